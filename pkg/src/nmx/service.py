"""HTTP session service: the questionnaire API consumed by the web client.

Sessions live in memory and expire after idleness; the JSON-lines session
log is the only persistence. Request handlers run in a thread pool, so the
store guards its map and each session serializes its own requests.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .dialog import (
    DIAGNOSED,
    IN_PROGRESS,
    NO_MATCH,
    DialogError,
    EmptyKnowledgeBaseError,
    InvalidAnswerError,
    Session,
)
from .dsl import KnowledgeBase, NmxError, parse_file

DEFAULT_SESSION_TTL_SECONDS = 30 * 60


class SessionLog:
    """Append-only JSON-lines event log; one object per line."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, event: str, session_id: str, payload: dict) -> None:
        record = {
            "ts": datetime.now(timezone.utc).isoformat(),
            "session_id": session_id,
            "event": event,
            "payload": payload,
        }
        line = json.dumps(record, ensure_ascii=False)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")


@dataclass
class _Entry:
    session: Session
    created: float
    last_access: float
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """Id-keyed live sessions with idle expiry; ids carry 128 bits of randomness."""

    def __init__(self, ttl_seconds: float = DEFAULT_SESSION_TTL_SECONDS):
        self.ttl = ttl_seconds
        self._lock = threading.Lock()
        self._entries: dict[str, _Entry] = {}

    def add(self, session: Session) -> str:
        now = time.monotonic()
        with self._lock:
            expired = [sid for sid, e in self._entries.items()
                       if now - e.last_access > self.ttl]
            for sid in expired:
                del self._entries[sid]
            self._entries[session.id] = _Entry(session, now, now)
        return session.id

    def get(self, session_id: str) -> Optional[_Entry]:
        now = time.monotonic()
        with self._lock:
            entry = self._entries.get(session_id)
            if entry is None:
                return None
            if now - entry.last_access > self.ttl:
                del self._entries[session_id]
                return None
            entry.last_access = now
            return entry


def _not_found() -> JSONResponse:
    return JSONResponse({"error": "session_not_found"}, status_code=404)


def create_app(kb_path=None, *, kb: Optional[KnowledgeBase] = None,
               static_dir=None, log_path=None,
               session_ttl: float = DEFAULT_SESSION_TTL_SECONDS) -> FastAPI:
    """Build the service app around one KB.

    Pass either a parsed `kb` or a `kb_path` (defaults to the bundled file).
    A KB that fails to load leaves the service up but answering 503 to
    session creation.
    """
    load_error: Optional[str] = None
    if kb is None:
        try:
            if kb_path is None:
                from .bundled import load_bundled
                kb = load_bundled()
            else:
                kb = parse_file(kb_path)
        except (NmxError, OSError) as exc:
            load_error = str(exc)

    store = SessionStore(ttl_seconds=session_ttl)
    log = SessionLog(log_path) if log_path else None

    app = FastAPI(title="nmx", docs_url=None, redoc_url=None)

    if static_dir is None:
        # API-only deployment: the browser client is served from elsewhere.
        from fastapi.middleware.cors import CORSMiddleware
        app.add_middleware(
            CORSMiddleware,
            allow_origins=["*"],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.post("/api/sessions")
    def create_session():
        if kb is None:
            return JSONResponse(
                {"error": "kb_load_failed", "detail": load_error}, status_code=503)
        try:
            session = Session(kb)
        except EmptyKnowledgeBaseError as exc:
            return JSONResponse(
                {"error": "kb_load_failed", "detail": str(exc)}, status_code=503)
        store.add(session)
        if log:
            log.append("created", session.id, {})
        return JSONResponse({"session_id": session.id}, status_code=201)

    @app.get("/api/sessions/{session_id}/next")
    def next_question(session_id: str):
        entry = store.get(session_id)
        if entry is None:
            return _not_found()
        with entry.lock:
            session = entry.session
            if session.status != IN_PROGRESS:
                return JSONResponse({"kind": "done"})
            step = session.next_step()
            if step.kind != "question":
                return JSONResponse({"kind": "done"})
            if log:
                log.append("question", session.id,
                           {"ident": step.ident, "prompt": step.prompt})
            return JSONResponse(
                {"kind": "question", "ident": step.ident, "prompt": step.prompt})

    @app.post("/api/sessions/{session_id}/answers")
    async def submit_answer(session_id: str, request: Request):
        entry = store.get(session_id)
        if entry is None:
            return _not_found()
        try:
            body = await request.json()
        except Exception:
            body = None
        if (not isinstance(body, dict)
                or not isinstance(body.get("ident"), str)
                or not isinstance(body.get("answer"), str)):
            return JSONResponse({"error": "malformed_answer"}, status_code=422)
        ident, answer = body["ident"], body["answer"]
        with entry.lock:
            session = entry.session
            try:
                session.submit_answer(ident, answer)
            except InvalidAnswerError as exc:
                return JSONResponse(
                    {"error": "invalid_answer", "detail": str(exc)}, status_code=422)
            except DialogError as exc:
                return JSONResponse(
                    {"error": "out_of_order_ident", "detail": str(exc)}, status_code=409)
            status = session.status
            asked = len(session.transcript)
            if log:
                payload = {"ident": ident, "answer": answer,
                           "status": status, "questions_asked": asked}
                if status == DIAGNOSED:
                    payload["diagnoses"] = [r.to_json_obj()
                                            for r in session.recommendations]
                    log.append("diagnosis", session.id, payload)
                elif status == NO_MATCH:
                    log.append("no_match", session.id, payload)
                else:
                    log.append("answer", session.id, payload)
            return JSONResponse({"status": status, "questions_asked": asked})

    @app.get("/api/sessions/{session_id}/result")
    def result(session_id: str):
        entry = store.get(session_id)
        if entry is None:
            return _not_found()
        with entry.lock:
            return JSONResponse(entry.session.result().to_json_obj())

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
