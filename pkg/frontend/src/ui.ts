/**
 * DOM layer: renders the current headline with its publication date, the
 * group gallery (most recently used first, up to three representative
 * headlines each), and wires clicks plus keyboard shortcuts.
 *
 * Shortcuts: n = new group, 1..9 = assign to the nth gallery group,
 * u = undo, r = retry after a network failure.
 */

import { SessionApi } from "./api.js";
import {
  WorkbenchState,
  assignCurrent,
  groupForShortcut,
  progressFraction,
  reconnect,
  undoLast,
} from "./state.js";

const SESSION_KEY = "groupline.session";

export interface WorkbenchController {
  state: WorkbenchState;
  destroy(): void;
}

export function rememberSession(sessionId: string): void {
  window.localStorage.setItem(SESSION_KEY, sessionId);
}

export function storedSession(): string | null {
  return window.localStorage.getItem(SESSION_KEY);
}

export function clearStoredSession(): void {
  window.localStorage.removeItem(SESSION_KEY);
}

export function mountWorkbench(
  root: HTMLElement,
  api: SessionApi,
  initial: WorkbenchState,
): WorkbenchController {
  const controller: WorkbenchController = {
    state: initial,
    destroy() {
      window.removeEventListener("keydown", onKey);
    },
  };

  function setState(next: WorkbenchState): void {
    controller.state = next;
    render();
  }

  async function act(action: Promise<WorkbenchState>): Promise<void> {
    try {
      setState(await action);
    } catch (error) {
      banner(`Action failed: ${(error as Error).message}`);
    }
  }

  function banner(message: string): void {
    const element = root.querySelector(".banner");
    if (element) {
      element.textContent = message;
      element.classList.add("visible");
    }
  }

  function onKey(event: KeyboardEvent): void {
    if (event.target instanceof HTMLInputElement) {
      return;
    }
    const { state } = controller;
    if (state.view.done) {
      return;
    }
    if (event.key === "n") {
      event.preventDefault();
      void act(assignCurrent(api, state, "new"));
    } else if (event.key === "u") {
      event.preventDefault();
      void act(undoLast(api, state));
    } else if (event.key === "r" && state.offline) {
      event.preventDefault();
      void act(reconnect(api, state));
    } else if (/^[1-9]$/.test(event.key)) {
      const group = groupForShortcut(state, Number(event.key));
      if (group !== null) {
        event.preventDefault();
        void act(assignCurrent(api, state, group));
      }
    }
  }

  function render(): void {
    const { view, offline } = controller.state;
    root.replaceChildren();

    const bannerBox = el("div", "banner");
    if (offline) {
      bannerBox.textContent = "Connection lost. Your progress is saved on the server.";
      bannerBox.classList.add("visible");
      const retry = el("button", "retry", "Retry (r)");
      retry.addEventListener("click", () => void act(reconnect(api, controller.state)));
      bannerBox.append(" ", retry);
    }
    root.append(bannerBox);

    const progress = el(
      "div",
      "progress",
      `${view.cursor} / ${view.total} headlines (${Math.round(progressFraction(controller.state) * 100)}%)`,
    );
    root.append(progress);

    if (view.done) {
      const doneBox = el("div", "done");
      doneBox.append(
        el("h2", "", "Timeline complete."),
        el("p", "", `All ${view.total} headlines are grouped.`),
      );
      const download = document.createElement("a");
      download.href = api.exportUrl(view.session_id);
      download.textContent = "Download annotation CSV";
      download.className = "export";
      doneBox.append(download);
      root.append(doneBox);
      return;
    }

    const headline = view.headline;
    if (headline) {
      const card = el("div", "headline-card");
      card.append(
        el("div", "headline-date", `${headline.date} — ${headline.source}`),
        el("h2", "headline-text", headline.text),
      );
      root.append(card);
    }

    const actions = el("div", "actions");
    const newGroup = el("button", "new-group", "New group (n)");
    newGroup.addEventListener("click", () => void act(assignCurrent(api, controller.state, "new")));
    const undo = el("button", "undo", "Undo (u)") as HTMLButtonElement;
    undo.disabled = view.cursor === 0;
    undo.addEventListener("click", () => void act(undoLast(api, controller.state)));
    actions.append(newGroup, undo);
    root.append(actions);

    const gallery = el("div", "gallery");
    view.groups.forEach((group, index) => {
      const card = el("div", "group-card");
      const assignLabel = index < 9 ? ` (${index + 1})` : "";
      const header = el(
        "button",
        "group-assign",
        `Group ${group.group_number}${assignLabel} — ${group.size} headline${group.size === 1 ? "" : "s"}, last ${group.last_date}`,
      );
      header.addEventListener("click", () =>
        void act(assignCurrent(api, controller.state, group.group_number)),
      );
      card.append(header);
      const list = el("ul", "representatives");
      for (const representative of group.representatives) {
        list.append(el("li", "", `${representative.date}: ${representative.text}`));
      }
      card.append(list);
      gallery.append(card);
    });
    root.append(gallery);
  }

  function el(tag: string, className: string, text?: string): HTMLElement {
    const element = document.createElement(tag);
    if (className) {
      element.className = className;
    }
    if (text !== undefined) {
      element.textContent = text;
    }
    return element;
  }

  window.addEventListener("keydown", onKey);
  render();
  return controller;
}
