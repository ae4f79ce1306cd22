/**
 * Workbench state machine.
 *
 * Pure functions around the SessionApi: every action round-trips through the
 * server and the returned view replaces the local one, so a browser refresh
 * (rebuilding state from the stored session id) lands exactly where the
 * annotator left off.
 */

import { SessionApi, SessionView } from "./api.js";

export interface WorkbenchState {
  view: SessionView;
  /** Networking failed on the last action; the UI shows a retry banner. */
  offline: boolean;
}

export function progressFraction(state: WorkbenchState): number {
  const { cursor, total } = state.view;
  return total === 0 ? 1 : cursor / total;
}

export async function startSession(
  api: SessionApi,
  annotatorId: string,
  timelineId: string,
): Promise<WorkbenchState> {
  const view = await api.createSession(annotatorId, timelineId);
  return { view, offline: false };
}

/** Rebuild state for an existing session (page refresh / reopened tab). */
export async function resumeSession(api: SessionApi, sessionId: string): Promise<WorkbenchState> {
  const view = await api.next(sessionId);
  return { view, offline: false };
}

async function refresh(api: SessionApi, state: WorkbenchState): Promise<WorkbenchState> {
  const view = await api.next(state.view.session_id);
  return { view, offline: false };
}

/**
 * Assign the current headline to `group` ("new" opens a fresh group), then
 * re-sync.  On a network failure the previous state is kept with the offline
 * flag raised, so nothing the annotator did is lost locally.
 */
export async function assignCurrent(
  api: SessionApi,
  state: WorkbenchState,
  group: number | "new",
): Promise<WorkbenchState> {
  try {
    await api.assign(state.view.session_id, group);
    return await refresh(api, state);
  } catch (error) {
    if (isNetworkFailure(error)) {
      return { ...state, offline: true };
    }
    throw error;
  }
}

export async function undoLast(api: SessionApi, state: WorkbenchState): Promise<WorkbenchState> {
  try {
    await api.undo(state.view.session_id);
    return await refresh(api, state);
  } catch (error) {
    if (isNetworkFailure(error)) {
      return { ...state, offline: true };
    }
    throw error;
  }
}

/** Retry the sync after a network failure. */
export async function reconnect(api: SessionApi, state: WorkbenchState): Promise<WorkbenchState> {
  try {
    return await refresh(api, state);
  } catch (error) {
    if (isNetworkFailure(error)) {
      return { ...state, offline: true };
    }
    throw error;
  }
}

/** Group number bound to the digit keys: 1 = most recently used group. */
export function groupForShortcut(state: WorkbenchState, digit: number): number | null {
  const groups = state.view.groups;
  if (digit < 1 || digit > groups.length) {
    return null;
  }
  return groups[digit - 1].group_number;
}

function isNetworkFailure(error: unknown): boolean {
  // fetch rejects with TypeError on connection problems; API errors carry a status
  return error instanceof TypeError;
}
