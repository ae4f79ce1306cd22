/**
 * Unit tests for the workbench state machine against a stubbed session
 * server.  The stub mimics the real service's semantics: server-side cursor,
 * gallery ordered by most recent use, 4xx on bad assignments.
 */

import assert from "node:assert/strict";
import { test } from "node:test";

import { SessionApi } from "../src/api.js";
import {
  assignCurrent,
  groupForShortcut,
  progressFraction,
  reconnect,
  resumeSession,
  startSession,
  undoLast,
} from "../src/state.js";

interface StubOptions {
  failNetwork?: () => boolean;
}

/** In-memory reimplementation of the session endpoints used by the UI. */
function stubServer(headlines: { id: string; text: string; date: string }[],
                    options: StubOptions = {}) {
  const assignments: { headlineId: string; group: number }[] = [];
  const sessionId = "stub-session";

  function view() {
    const done = assignments.length >= headlines.length;
    const byGroup = new Map<number, { headlineId: string; index: number }[]>();
    assignments.forEach((assignment, index) => {
      const list = byGroup.get(assignment.group) ?? [];
      list.push({ headlineId: assignment.headlineId, index });
      byGroup.set(assignment.group, list);
    });
    const groups = [...byGroup.entries()]
      .sort((a, b) => b[1][b[1].length - 1].index - a[1][a[1].length - 1].index)
      .map(([group_number, members]) => ({
        group_number,
        size: members.length,
        last_date: lookup(members[members.length - 1].headlineId).date,
        representatives: members
          .slice(-3)
          .reverse()
          .map((member) => ({
            id: member.headlineId,
            text: lookup(member.headlineId).text,
            date: lookup(member.headlineId).date,
          })),
      }));
    return {
      session_id: sessionId,
      annotator_id: "tester",
      timeline_id: "stub",
      cursor: assignments.length,
      total: headlines.length,
      done,
      headline: done ? null : { ...headlines[assignments.length], source: "stub" },
      groups,
    };
  }

  function lookup(headlineId: string) {
    const found = headlines.find((h) => h.id === headlineId);
    assert.ok(found);
    return found;
  }

  const fetchImpl: typeof fetch = async (input, init) => {
    if (options.failNetwork?.()) {
      throw new TypeError("fetch failed");
    }
    const url = String(input);
    const json = (payload: unknown, status = 200) =>
      new Response(JSON.stringify(payload), { status });

    if (url.endsWith("/sessions") && init?.method === "POST") {
      return json(view(), 201);
    }
    if (url.endsWith("/next")) {
      return json(view());
    }
    if (url.endsWith("/assign")) {
      const body = JSON.parse(String(init?.body)) as { group: number | "new" };
      if (assignments.length >= headlines.length) {
        return json({ error: "timeline complete" }, 400);
      }
      let group: number;
      if (body.group === "new") {
        group = Math.max(0, ...assignments.map((a) => a.group)) + 1;
      } else {
        group = body.group;
        if (!assignments.some((a) => a.group === group)) {
          return json({ error: `group ${group} does not exist yet` }, 400);
        }
      }
      assignments.push({ headlineId: headlines[assignments.length].id, group });
      return json({ assigned_group: group, cursor: assignments.length, done: view().done });
    }
    if (url.endsWith("/undo")) {
      if (assignments.length === 0) {
        return json({ error: "nothing to undo" }, 400);
      }
      assignments.pop();
      return json({ cursor: assignments.length });
    }
    return json({ error: `no route: ${url}` }, 404);
  };

  return { api: new SessionApi("http://stub", fetchImpl), sessionId };
}

const THREE = [
  { id: "x1", text: "first event", date: "2015-01-14" },
  { id: "x2", text: "second event", date: "2015-01-15" },
  { id: "x3", text: "first event follow-up", date: "2015-01-16" },
];

test("all-new-group flow produces all singletons", async () => {
  const { api } = stubServer(THREE);
  let state = await startSession(api, "tester", "stub");
  assert.equal(state.view.cursor, 0);
  for (let i = 0; i < 3; i += 1) {
    state = await assignCurrent(api, state, "new");
  }
  assert.equal(state.view.done, true);
  assert.equal(state.view.groups.length, 3);
  assert.deepEqual(
    state.view.groups.map((g) => g.size),
    [1, 1, 1],
  );
});

test("assigning to an existing group groups the headlines", async () => {
  const { api } = stubServer(THREE);
  let state = await startSession(api, "tester", "stub");
  state = await assignCurrent(api, state, "new"); // group 1
  state = await assignCurrent(api, state, "new"); // group 2
  state = await assignCurrent(api, state, 1); // join group 1
  assert.equal(state.view.done, true);
  const sizes = new Map(state.view.groups.map((g) => [g.group_number, g.size]));
  assert.equal(sizes.get(1), 2);
  assert.equal(sizes.get(2), 1);
});

test("gallery is ordered most recently used first and drives shortcuts", async () => {
  const { api } = stubServer(THREE);
  let state = await startSession(api, "tester", "stub");
  state = await assignCurrent(api, state, "new"); // group 1
  state = await assignCurrent(api, state, "new"); // group 2 (most recent)
  assert.deepEqual(
    state.view.groups.map((g) => g.group_number),
    [2, 1],
  );
  assert.equal(groupForShortcut(state, 1), 2);
  assert.equal(groupForShortcut(state, 2), 1);
  assert.equal(groupForShortcut(state, 3), null);
});

test("undo returns to the previous state", async () => {
  const { api } = stubServer(THREE);
  let state = await startSession(api, "tester", "stub");
  state = await assignCurrent(api, state, "new");
  assert.equal(state.view.cursor, 1);
  state = await undoLast(api, state);
  assert.equal(state.view.cursor, 0);
  assert.equal(state.view.groups.length, 0);
  assert.equal(state.view.headline?.id, "x1");
});

test("progress fraction tracks the cursor", async () => {
  const { api } = stubServer(THREE);
  let state = await startSession(api, "tester", "stub");
  assert.equal(progressFraction(state), 0);
  state = await assignCurrent(api, state, "new");
  assert.ok(Math.abs(progressFraction(state) - 1 / 3) < 1e-12);
});

test("resume rebuilds state from the server", async () => {
  const { api, sessionId } = stubServer(THREE);
  let state = await startSession(api, "tester", "stub");
  state = await assignCurrent(api, state, "new");
  const resumed = await resumeSession(api, sessionId);
  assert.equal(resumed.view.cursor, 1);
  assert.deepEqual(resumed.view.groups, state.view.groups);
});

test("network failure raises the offline flag without losing state", async () => {
  let failing = false;
  const { api } = stubServer(THREE, { failNetwork: () => failing });
  let state = await startSession(api, "tester", "stub");
  state = await assignCurrent(api, state, "new");

  failing = true;
  const offline = await assignCurrent(api, state, "new");
  assert.equal(offline.offline, true);
  assert.equal(offline.view.cursor, state.view.cursor); // local view unchanged

  failing = false;
  const recovered = await reconnect(api, offline);
  assert.equal(recovered.offline, false);
  // the failed assign never reached the server: cursor still 1
  assert.equal(recovered.view.cursor, 1);
});

test("server rejections surface as errors, not silent state changes", async () => {
  const { api } = stubServer(THREE);
  const state = await startSession(api, "tester", "stub");
  await assert.rejects(assignCurrent(api, state, 99), /group 99/);
});
