"""HTTP session service backing the annotation workbench.

Annotators step through a timeline one headline at a time in chronological
order, assigning each to an existing group number or opening a new one.  All
session state lives server-side in an append-only event log per session, so a
browser refresh (or a service restart) resumes exactly where the annotator
stopped.
"""

from __future__ import annotations

import json
import os
import re
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .corpus import Timeline, parse_timeline

DATA_DIR_ENV = "GROUPLINE_DATA_DIR"
DEFAULT_DATA_DIR = "groupline_data"


class ServiceError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class Session:
    """One annotator's in-progress pass over one timeline."""

    session_id: str
    annotator_id: str
    timeline_id: str
    assignments: list[tuple[str, int]] = field(default_factory=list)
    created: str = ""
    updated: str = ""

    @property
    def cursor(self) -> int:
        return len(self.assignments)

    def group_numbers(self) -> list[int]:
        return sorted({group for _, group in self.assignments})

    def next_group_number(self) -> int:
        numbers = self.group_numbers()
        return (numbers[-1] + 1) if numbers else 1

    def export_rows(self) -> str:
        """CSV of the assignment so far; total (a valid annotation set) only
        once the session is complete."""
        lines = [f"# annotator: {self.annotator_id}", "headline_id,group_number"]
        lines += [f"{hid},{group}" for hid, group in self.assignments]
        return "\n".join(lines) + "\n"


class SessionStore:
    """Timelines plus persisted sessions under one data directory.

    Layout: ``<root>/timelines/*.jsonl`` for the served timelines and
    ``<root>/sessions/<id>.ndjson`` for one event log per session.  Mutations
    are serialized per session and appended to the log before they are
    acknowledged.
    """

    def __init__(self, data_dir: str | Path | None = None):
        root = Path(data_dir or os.environ.get(DATA_DIR_ENV, DEFAULT_DATA_DIR))
        self.root = root
        self.timeline_dir = root / "timelines"
        self.session_dir = root / "sessions"
        self.timeline_dir.mkdir(parents=True, exist_ok=True)
        self.session_dir.mkdir(parents=True, exist_ok=True)
        self.timelines: dict[str, Timeline] = {}
        for path in sorted(self.timeline_dir.glob("*.jsonl")):
            timeline = parse_timeline(path)
            self.timelines[timeline.timeline_id] = timeline
        self.sessions: dict[str, Session] = {}
        self._store_lock = threading.Lock()
        self._session_locks: dict[str, threading.Lock] = {}
        for path in sorted(self.session_dir.glob("*.ndjson")):
            session = self._replay(path)
            if session is not None:
                self.sessions[session.session_id] = session
                self._session_locks[session.session_id] = threading.Lock()

    def _replay(self, path: Path) -> Session | None:
        session: Session | None = None
        for line in path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            event = json.loads(line)
            kind = event["event"]
            if kind == "create":
                session = Session(
                    session_id=event["session_id"],
                    annotator_id=event["annotator_id"],
                    timeline_id=event["timeline_id"],
                    created=event.get("ts", ""),
                    updated=event.get("ts", ""),
                )
            elif session is None:
                raise ValueError(f"{path}: event before create")
            elif kind == "assign":
                session.assignments.append((event["headline_id"], int(event["group"])))
                session.updated = event.get("ts", session.updated)
            elif kind == "undo":
                if session.assignments:
                    session.assignments.pop()
                session.updated = event.get("ts", session.updated)
        return session

    def _append_event(self, session_id: str, event: dict) -> None:
        path = self.session_dir / f"{session_id}.ndjson"
        with path.open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(event, ensure_ascii=False) + "\n")

    def _get_timeline(self, timeline_id: str) -> Timeline:
        if timeline_id not in self.timelines:
            raise ServiceError(404, f"unknown timeline {timeline_id!r}")
        return self.timelines[timeline_id]

    def _get_session(self, session_id: str) -> tuple[Session, threading.Lock]:
        if session_id not in self.sessions:
            raise ServiceError(404, f"unknown session {session_id!r}")
        return self.sessions[session_id], self._session_locks[session_id]

    # ---- operations ------------------------------------------------------

    def list_timelines(self) -> list[dict]:
        return [
            {
                "timeline_id": t.timeline_id,
                "name": t.name,
                "size": len(t),
                "split": t.split,
            }
            for t in sorted(self.timelines.values(), key=lambda t: t.timeline_id)
        ]

    def create_session(self, annotator_id: str, timeline_id: str) -> dict:
        if not annotator_id or not isinstance(annotator_id, str):
            raise ServiceError(400, "annotator_id is required")
        self._get_timeline(timeline_id)
        with self._store_lock:
            session_id = uuid.uuid4().hex[:12]
            session = Session(
                session_id=session_id,
                annotator_id=annotator_id,
                timeline_id=timeline_id,
                created=_now(),
                updated=_now(),
            )
            self.sessions[session_id] = session
            self._session_locks[session_id] = threading.Lock()
        self._append_event(
            session_id,
            {
                "event": "create",
                "session_id": session_id,
                "annotator_id": annotator_id,
                "timeline_id": timeline_id,
                "ts": session.created,
            },
        )
        return self.next_payload(session_id)

    def next_payload(self, session_id: str) -> dict:
        session, lock = self._get_session(session_id)
        with lock:
            timeline = self._get_timeline(session.timeline_id)
            done = session.cursor >= len(timeline)
            current = None
            if not done:
                headline = timeline.headlines[session.cursor]
                current = {
                    "id": headline.id,
                    "text": headline.text,
                    "date": headline.publish_date.isoformat(),
                    "source": headline.source,
                }
            return {
                "session_id": session.session_id,
                "annotator_id": session.annotator_id,
                "timeline_id": session.timeline_id,
                "cursor": session.cursor,
                "total": len(timeline),
                "done": done,
                "headline": current,
                "groups": self._group_gallery(session, timeline),
            }

    def _group_gallery(self, session: Session, timeline: Timeline) -> list[dict]:
        """Existing groups, most recently extended first, with up to three of
        their most recent member headlines as representatives."""
        by_id = timeline.by_id()
        members: dict[int, list[str]] = {}
        last_index: dict[int, int] = {}
        for index, (hid, group) in enumerate(session.assignments):
            members.setdefault(group, []).append(hid)
            last_index[group] = index
        gallery = []
        for group in sorted(members, key=lambda g: -last_index[g]):
            recent = members[group][-3:][::-1]
            gallery.append(
                {
                    "group_number": group,
                    "size": len(members[group]),
                    "last_date": by_id[members[group][-1]].publish_date.isoformat(),
                    "representatives": [
                        {
                            "id": hid,
                            "text": by_id[hid].text,
                            "date": by_id[hid].publish_date.isoformat(),
                        }
                        for hid in recent
                    ],
                }
            )
        return gallery

    def assign(self, session_id: str, group) -> dict:
        session, lock = self._get_session(session_id)
        with lock:
            timeline = self._get_timeline(session.timeline_id)
            if session.cursor >= len(timeline):
                raise ServiceError(400, "timeline complete; nothing left to assign")
            if group == "new":
                number = session.next_group_number()
            elif isinstance(group, int) and not isinstance(group, bool):
                if group not in session.group_numbers():
                    raise ServiceError(400, f"group {group} does not exist yet")
                number = group
            else:
                raise ServiceError(400, "group must be an existing group number or \"new\"")
            headline = timeline.headlines[session.cursor]
            session.assignments.append((headline.id, number))
            session.updated = _now()
            self._append_event(
                session_id,
                {"event": "assign", "headline_id": headline.id, "group": number, "ts": session.updated},
            )
            return {
                "assigned_group": number,
                "cursor": session.cursor,
                "done": session.cursor >= len(timeline),
            }

    def undo(self, session_id: str) -> dict:
        session, lock = self._get_session(session_id)
        with lock:
            if not session.assignments:
                raise ServiceError(400, "nothing to undo")
            session.assignments.pop()
            session.updated = _now()
            self._append_event(session_id, {"event": "undo", "ts": session.updated})
            return {"cursor": session.cursor}

    def export_csv(self, session_id: str) -> tuple[str, str]:
        session, lock = self._get_session(session_id)
        with lock:
            filename = f"{session.annotator_id}__{session.timeline_id}.csv"
            return session.export_rows(), filename


_SESSION_ROUTE = re.compile(r"^/sessions/([0-9a-f]+)/(next|assign|undo|export)$")


class _Handler(BaseHTTPRequestHandler):
    store: SessionStore  # injected by make_server

    def log_message(self, format: str, *args) -> None:  # noqa: A002 - stdlib signature
        pass

    def _send(self, status: int, payload: dict | list) -> None:
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self._cors()
        self.end_headers()
        self.wfile.write(body)

    def _send_csv(self, text: str, filename: str) -> None:
        body = text.encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", "text/csv; charset=utf-8")
        self.send_header("Content-Disposition", f'attachment; filename="{filename}"')
        self.send_header("Content-Length", str(len(body)))
        self._cors()
        self.end_headers()
        self.wfile.write(body)

    def _cors(self) -> None:
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")

    def _read_json(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return {}
        try:
            payload = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ServiceError(400, f"invalid JSON body: {exc}") from exc
        if not isinstance(payload, dict):
            raise ServiceError(400, "JSON body must be an object")
        return payload

    def do_OPTIONS(self) -> None:  # preflight for the browser workbench
        self.send_response(204)
        self._cors()
        self.end_headers()

    def do_GET(self) -> None:
        try:
            if self.path == "/timelines":
                self._send(200, self.store.list_timelines())
                return
            match = _SESSION_ROUTE.match(self.path)
            if match and match.group(2) == "next":
                self._send(200, self.store.next_payload(match.group(1)))
                return
            if match and match.group(2) == "export":
                text, filename = self.store.export_csv(match.group(1))
                self._send_csv(text, filename)
                return
            raise ServiceError(404, f"no route for GET {self.path}")
        except ServiceError as exc:
            self._send(exc.status, {"error": exc.message})

    def do_POST(self) -> None:
        try:
            if self.path == "/sessions":
                body = self._read_json()
                payload = self.store.create_session(
                    body.get("annotator_id", ""), body.get("timeline_id", "")
                )
                self._send(201, payload)
                return
            match = _SESSION_ROUTE.match(self.path)
            if match and match.group(2) == "assign":
                body = self._read_json()
                if "group" not in body:
                    raise ServiceError(400, "body must carry a 'group' field")
                self._send(200, self.store.assign(match.group(1), body["group"]))
                return
            if match and match.group(2) == "undo":
                self._send(200, self.store.undo(match.group(1)))
                return
            raise ServiceError(404, f"no route for POST {self.path}")
        except ServiceError as exc:
            self._send(exc.status, {"error": exc.message})


def make_server(
    host: str = "127.0.0.1", port: int = 8765, data_dir: str | Path | None = None
) -> ThreadingHTTPServer:
    """Build (but do not start) the session service; port 0 picks a free port."""
    store = SessionStore(data_dir)
    handler = type("BoundHandler", (_Handler,), {"store": store})
    return ThreadingHTTPServer((host, port), handler)


def run_service(host: str = "127.0.0.1", port: int = 8765, data_dir: str | Path | None = None) -> None:
    server = make_server(host, port, data_dir)
    address = f"http://{server.server_address[0]}:{server.server_address[1]}"
    print(f"session service listening on {address}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
