/**
 * Bootstrap: pick a timeline, start (or resume) a session, mount the
 * workbench.  The session id lives in localStorage so a refresh resumes the
 * same server-side session.
 */

import { SessionApi } from "./api.js";
import { resumeSession, startSession } from "./state.js";
import { clearStoredSession, mountWorkbench, rememberSession, storedSession } from "./ui.js";

const DEFAULT_SERVICE = "http://127.0.0.1:8765";

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) {
    return;
  }
  const params = new URLSearchParams(window.location.search);
  const api = new SessionApi(params.get("service") ?? DEFAULT_SERVICE);

  const existing = storedSession();
  if (existing) {
    try {
      const state = await resumeSession(api, existing);
      mountWorkbench(root, api, state);
      return;
    } catch {
      clearStoredSession(); // stale session: fall through to the picker
    }
  }

  const timelines = await api.listTimelines();
  root.replaceChildren();
  const form = document.createElement("form");
  form.className = "start-form";

  const nameLabel = document.createElement("label");
  nameLabel.textContent = "Annotator id ";
  const nameInput = document.createElement("input");
  nameInput.required = true;
  nameInput.placeholder = "your-name";
  nameLabel.append(nameInput);

  const timelineLabel = document.createElement("label");
  timelineLabel.textContent = "Timeline ";
  const select = document.createElement("select");
  for (const timeline of timelines) {
    const option = document.createElement("option");
    option.value = timeline.timeline_id;
    option.textContent = `${timeline.name} (${timeline.size} headlines)`;
    select.append(option);
  }
  timelineLabel.append(select);

  const start = document.createElement("button");
  start.type = "submit";
  start.textContent = "Start annotating";

  form.append(nameLabel, timelineLabel, start);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void (async () => {
      const state = await startSession(api, nameInput.value.trim(), select.value);
      rememberSession(state.view.session_id);
      mountWorkbench(root, api, state);
    })();
  });
  root.append(form);
}

void boot();
