/**
 * End-to-end: drive the real session service through the same client the UI
 * uses, reproduce the bundled excerpt timeline's gold group column five
 * times, merge the five exports with the pipeline CLI, and check the merged
 * groups equal the gold groups up to relabeling.  Also covers the
 * mid-session refresh contract.
 *
 * Requires python3 with the groupline package installed (the repository
 * root's `pip install -e .`).
 */

import assert from "node:assert/strict";
import { after, before, test } from "node:test";
import { execFile, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, copyFileSync, mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, dirname } from "node:path";
import { fileURLToPath } from "node:url";
import { promisify } from "node:util";

import { SessionApi } from "../src/api.js";
import { assignCurrent, resumeSession, startSession } from "../src/state.js";

const execFileAsync = promisify(execFile);

const HERE = dirname(fileURLToPath(import.meta.url));
const REPO_ROOT = join(HERE, "..", "..", "..");
const FIXTURES = join(REPO_ROOT, "tests", "fixtures");

let service: ChildProcess | null = null;
let baseUrl = "";
let workDir = "";

function goldGroups(): Map<string, string> {
  const rows = readFileSync(join(FIXTURES, "space_excerpt_groups.csv"), "utf-8")
    .split("\n")
    .map((line) => line.trim())
    .filter((line) => line && !line.startsWith("headline_id"));
  return new Map(rows.map((row) => {
    const [id, group] = row.split(",");
    return [id, group] as const;
  }));
}

/** Partition signature: the set of groups, each as a sorted member list. */
function signature(assignment: Map<string, string>): string {
  const byGroup = new Map<string, string[]>();
  for (const [id, group] of assignment) {
    const list = byGroup.get(group) ?? [];
    list.push(id);
    byGroup.set(group, list);
  }
  return [...byGroup.values()]
    .map((members) => members.sort().join("+"))
    .sort()
    .join("|");
}

function parseAnnotationCsv(text: string): Map<string, string> {
  const assignment = new Map<string, string>();
  for (const line of text.split("\n")) {
    const trimmed = line.trim();
    if (!trimmed || trimmed.startsWith("#") || trimmed.startsWith("headline_id")) {
      continue;
    }
    const [id, group] = trimmed.split(",");
    assignment.set(id, group);
  }
  return assignment;
}

before(async () => {
  workDir = mkdtempSync(join(tmpdir(), "groupline-e2e-"));
  mkdirSync(join(workDir, "timelines"), { recursive: true });
  copyFileSync(
    join(FIXTURES, "space_excerpt.jsonl"),
    join(workDir, "timelines", "space_excerpt.jsonl"),
  );

  service = spawn(
    "python3",
    ["-u", "-m", "groupline.cli", "serve", "--port", "0", "--data-dir", workDir],
    { stdio: ["ignore", "pipe", "inherit"] },
  );
  baseUrl = await new Promise<string>((resolve, reject) => {
    const timer = setTimeout(() => reject(new Error("service did not start")), 15000);
    service!.stdout!.on("data", (chunk: Buffer) => {
      const match = /listening on (http:\/\/[\d.]+:\d+)/.exec(chunk.toString());
      if (match) {
        clearTimeout(timer);
        resolve(match[1]);
      }
    });
    service!.on("exit", (code) => reject(new Error(`service exited early: ${code}`)));
  });
});

after(() => {
  service?.kill();
});

test("five annotation rounds over HTTP merge back to the gold groups", async () => {
  const api = new SessionApi(baseUrl);
  const timelines = await api.listTimelines();
  assert.equal(timelines.length, 1);
  assert.equal(timelines[0].timeline_id, "space-excerpt");
  assert.equal(timelines[0].size, 47);

  const gold = goldGroups();
  const exportPaths: string[] = [];

  for (let annotator = 1; annotator <= 5; annotator += 1) {
    let state = await startSession(api, `a${annotator}`, "space-excerpt");
    const serverGroupFor = new Map<string, number>();

    while (!state.view.done) {
      const headline = state.view.headline;
      assert.ok(headline);
      const goldGroup = gold.get(headline.id);
      assert.ok(goldGroup, `fixture has no group for ${headline.id}`);

      const known = serverGroupFor.get(goldGroup);
      const cursorBefore = state.view.cursor;
      state = await assignCurrent(api, state, known ?? "new");
      assert.equal(state.view.cursor, cursorBefore + 1);
      if (known === undefined) {
        // the group we just opened is the most recently used one
        serverGroupFor.set(goldGroup, state.view.groups[0].group_number);
      }

      // midway through the first round, simulate a browser refresh
      if (annotator === 1 && state.view.cursor === 24) {
        const resumed = await resumeSession(api, state.view.session_id);
        assert.equal(resumed.view.cursor, state.view.cursor);
        assert.deepEqual(resumed.view.groups, state.view.groups);
        assert.deepEqual(resumed.view.headline, state.view.headline);
        state = resumed;
      }
    }

    assert.equal(state.view.cursor, 47);
    const csv = await api.exportCsv(state.view.session_id);
    assert.match(csv, new RegExp(`# annotator: a${annotator}`));
    const assignment = parseAnnotationCsv(csv);
    assert.equal(assignment.size, 47);
    // the export reproduces the gold grouping up to relabeling
    assert.equal(signature(assignment), signature(gold));

    const path = join(workDir, `a${annotator}.csv`);
    writeFileSync(path, csv, "utf-8");
    exportPaths.push(path);
  }

  // merge the five exports through the pipeline CLI
  const mergedPath = join(workDir, "merged.csv");
  const args = [
    "-m", "groupline.cli", "merge",
    "--timeline", join(workDir, "timelines", "space_excerpt.jsonl"),
    "--out", mergedPath,
  ];
  for (const path of exportPaths) {
    args.push("--annotations", path);
  }
  await execFileAsync("python3", args);

  const merged = parseAnnotationCsv(readFileSync(mergedPath, "utf-8"));
  assert.equal(merged.size, 47);
  assert.equal(signature(merged), signature(gold));
});

test("stale sessions are rejected so the UI can fall back to the picker", async () => {
  const api = new SessionApi(baseUrl);
  await assert.rejects(resumeSession(api, "0123456789ab"), /unknown session/);
});
