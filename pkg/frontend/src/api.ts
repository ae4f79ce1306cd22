/**
 * Typed client for the annotation session service.
 *
 * The server is the source of truth for all session state; every call returns
 * the server's view so the UI never has to reconcile local guesses.
 */

export interface TimelineSummary {
  timeline_id: string;
  name: string;
  size: number;
  split: string;
}

export interface HeadlineCard {
  id: string;
  text: string;
  date: string;
  source: string;
}

export interface GroupCard {
  group_number: number;
  size: number;
  last_date: string;
  representatives: { id: string; text: string; date: string }[];
}

export interface SessionView {
  session_id: string;
  annotator_id: string;
  timeline_id: string;
  cursor: number;
  total: number;
  done: boolean;
  headline: HeadlineCard | null;
  groups: GroupCard[];
}

export interface AssignResult {
  assigned_group: number;
  cursor: number;
  done: boolean;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

type FetchLike = typeof fetch;

export class SessionApi {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const body = await response.text();
    if (!response.ok) {
      let message = body;
      try {
        message = (JSON.parse(body) as { error?: string }).error ?? body;
      } catch {
        // non-JSON error body; keep the raw text
      }
      throw new ApiError(response.status, message);
    }
    return JSON.parse(body) as T;
  }

  listTimelines(): Promise<TimelineSummary[]> {
    return this.request<TimelineSummary[]>("/timelines");
  }

  createSession(annotatorId: string, timelineId: string): Promise<SessionView> {
    return this.request<SessionView>("/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ annotator_id: annotatorId, timeline_id: timelineId }),
    });
  }

  next(sessionId: string): Promise<SessionView> {
    return this.request<SessionView>(`/sessions/${sessionId}/next`);
  }

  assign(sessionId: string, group: number | "new"): Promise<AssignResult> {
    return this.request<AssignResult>(`/sessions/${sessionId}/assign`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ group }),
    });
  }

  undo(sessionId: string): Promise<{ cursor: number }> {
    return this.request<{ cursor: number }>(`/sessions/${sessionId}/undo`, {
      method: "POST",
    });
  }

  /** Raw CSV text of a completed session. */
  async exportCsv(sessionId: string): Promise<string> {
    const response = await this.fetchImpl(`${this.baseUrl}/sessions/${sessionId}/export`);
    const body = await response.text();
    if (!response.ok) {
      throw new ApiError(response.status, body);
    }
    return body;
  }

  exportUrl(sessionId: string): string {
    return `${this.baseUrl}/sessions/${sessionId}/export`;
  }
}
