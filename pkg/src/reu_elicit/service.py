"""HTTP session service: one elicitation procedure per session, answered by
polling clients (a browser UI or any scripted HTTP client).

Each session runs its procedure on a dedicated thread against a blocking
SessionOracle; the HTTP layer publishes the pending query and feeds answers
in. Transcripts are appended to disk per answer, and a session found
unfinished at startup is rehydrated by replaying its recorded answers into a
fresh procedure run, which lands it back at the same pending query.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field

from .config import canonical_json, config_hash
from .engine import Preference
from .errors import ConfigError, QueryMismatchError, SessionStateError
from .oracle import SessionOracle, Transcript, TranscriptEntry, wall_clock
from .runners import run_procedure, space_from_config, validate_config

AWAITING = "awaiting"
DONE = "done"
ABORTED = "aborted"

#: How long an HTTP call waits for the procedure thread to publish progress.
ADVANCE_TIMEOUT = 30.0


@dataclass
class Session:
    id: str
    procedure: str
    config: dict
    directory: str
    oracle: SessionOracle
    state: str = AWAITING
    results: dict | None = None
    error: str | None = None
    created_at: str = field(default_factory=wall_clock)
    lock: threading.Lock = field(default_factory=threading.Lock)
    advance: threading.Event = field(default_factory=threading.Event)

    @property
    def manifest_path(self) -> str:
        return os.path.join(self.directory, "manifest.json")

    @property
    def transcript_path(self) -> str:
        return os.path.join(self.directory, "transcript.jsonl")

    def manifest(self) -> dict:
        data = {
            "id": self.id,
            "procedure": self.procedure,
            "config": self.config,
            "config_hash": config_hash(self.config),
            "state": self.state,
            "created_at": self.created_at,
        }
        if self.results is not None:
            data["results"] = self.results
        if self.error is not None:
            data["error"] = self.error
        return data

    def persist_manifest(self) -> None:
        tmp = self.manifest_path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(canonical_json(self.manifest()))
        os.replace(tmp, self.manifest_path)


class SessionStore:
    """Creates, runs, persists, and rehydrates sessions under one directory."""

    def __init__(self, data_dir: str):
        self.data_dir = data_dir
        os.makedirs(data_dir, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    # -- lifecycle ---------------------------------------------------------

    def create(self, procedure: str, config: dict) -> Session:
        validate_config(procedure, config)
        sid = uuid.uuid4().hex[:12]
        directory = os.path.join(self.data_dir, sid)
        os.makedirs(directory)
        session = self._start(sid, procedure, config, directory, prefed=(), skip_lines=0)
        session.persist_manifest()
        # First query is computed by the procedure thread; wait for it.
        session.advance.wait(ADVANCE_TIMEOUT)
        return session

    def _start(
        self,
        sid: str,
        procedure: str,
        config: dict,
        directory: str,
        prefed,
        skip_lines: int,
    ) -> Session:
        space = space_from_config(config)
        oracle = SessionOracle(space, prefed=prefed)
        session = Session(sid, procedure, config, directory, oracle)

        def persist_entry(entry: TranscriptEntry) -> None:
            if len(oracle.transcript.entries) <= skip_lines:
                return
            line = canonical_json(
                {
                    "id": entry.query.id,
                    "left": _gamble_json(entry.query.left),
                    "right": _gamble_json(entry.query.right),
                    "answer": entry.answer.value,
                    "t": entry.asked_at,
                }
            )
            with open(session.transcript_path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")

        oracle.transcript.on_record = persist_entry
        oracle.on_pending = lambda q: session.advance.set()

        def body() -> None:
            try:
                results = run_procedure(procedure, config, oracle)
                with session.lock:
                    session.results = results
                    session.state = DONE
            except Exception as exc:  # noqa: BLE001 - any failure aborts the session
                with session.lock:
                    session.state = ABORTED
                    session.error = f"{type(exc).__name__}: {exc}"
            session.persist_manifest()
            session.advance.set()

        thread = threading.Thread(target=body, name=f"session-{sid}", daemon=True)
        with self._lock:
            self._sessions[sid] = session
        thread.start()
        return session

    def rehydrate(self) -> None:
        """Resume every persisted, unfinished session from its transcript."""
        for sid in sorted(os.listdir(self.data_dir)):
            directory = os.path.join(self.data_dir, sid)
            manifest_path = os.path.join(directory, "manifest.json")
            if sid in self._sessions or not os.path.isfile(manifest_path):
                continue
            with open(manifest_path, "r", encoding="utf-8") as fh:
                manifest = json.load(fh)
            if manifest["state"] == DONE:
                session = Session(
                    sid,
                    manifest["procedure"],
                    manifest["config"],
                    directory,
                    SessionOracle(space_from_config(manifest["config"])),
                    state=DONE,
                    results=manifest.get("results"),
                    created_at=manifest.get("created_at", wall_clock()),
                )
                with self._lock:
                    self._sessions[sid] = session
                continue
            if manifest["state"] == ABORTED:
                continue
            transcript_path = os.path.join(directory, "transcript.jsonl")
            prefed: list[tuple[Preference, str]] = []
            if os.path.isfile(transcript_path):
                with open(transcript_path, "r", encoding="utf-8") as fh:
                    recorded = Transcript.from_jsonl(fh.read())
                prefed = [(e.answer, e.asked_at) for e in recorded.entries]
            session = self._start(
                sid,
                manifest["procedure"],
                manifest["config"],
                directory,
                prefed=prefed,
                skip_lines=len(prefed),
            )
            session.created_at = manifest.get("created_at", session.created_at)
            session.advance.wait(ADVANCE_TIMEOUT)

    # -- access ------------------------------------------------------------

    def get(self, sid: str) -> Session:
        with self._lock:
            session = self._sessions.get(sid)
        if session is None:
            raise KeyError(sid)
        return session

    def _poll(self, session: Session, ready, timeout: float = ADVANCE_TIMEOUT):
        """Poll `ready` until it returns a payload, the session settles, or timeout."""
        deadline = time.monotonic() + timeout
        while True:
            out = ready()
            if out is not None:
                return out
            if time.monotonic() >= deadline:
                return None
            time.sleep(0.005)

    def next_payload(self, sid: str) -> dict:
        session = self.get(sid)

        def ready():
            with session.lock:
                state, error = session.state, session.error
            if state == DONE:
                return {"done": True}
            if state == ABORTED:
                raise SessionStateError(f"session aborted: {error}")
            pending = session.oracle.pending
            if pending is not None and not session.oracle.replaying:
                return pending.payload()
            return None

        out = self._poll(session, ready)
        if out is None:
            raise SessionStateError("no pending query (procedure is computing)")
        return out

    def submit_answer(self, sid: str, query_id: int, answer: Preference) -> dict:
        session = self.get(sid)
        with session.lock:
            if session.state == DONE:
                raise SessionStateError("session is already done")
            if session.state == ABORTED:
                raise SessionStateError(f"session aborted: {session.error}")
        session.oracle.submit(query_id, answer)

        def ready():
            with session.lock:
                state, error = session.state, session.error
            if state == DONE:
                return {"state": DONE}
            if state == ABORTED:
                raise SessionStateError(f"session aborted: {error}")
            pending = session.oracle.pending
            if pending is not None:
                return {"state": AWAITING, "query": pending.payload()}
            return None

        out = self._poll(session, ready)
        if out is None:
            raise SessionStateError("procedure did not advance in time")
        return out

    def results(self, sid: str) -> dict:
        session = self.get(sid)
        with session.lock:
            if session.state != DONE:
                raise SessionStateError(f"session is {session.state}, not done")
            return dict(session.results or {})

    def transcript_text(self, sid: str) -> str:
        session = self.get(sid)
        if os.path.isfile(session.transcript_path):
            with open(session.transcript_path, "r", encoding="utf-8") as fh:
                return fh.read()
        return ""


def _gamble_json(g):
    from .config import gamble_to_json

    return gamble_to_json(g)


try:
    from pydantic import BaseModel as _BaseModel
except ImportError:  # pragma: no cover - fastapi always brings pydantic
    _BaseModel = object


class CreateBody(_BaseModel):
    procedure: str
    config: dict


class AnswerBody(_BaseModel):
    query_id: int
    answer: str


def create_app(data_dir: str, static_dir: str | None = None):
    """FastAPI app exposing the session protocol under /api/v1."""
    from fastapi import FastAPI, HTTPException
    from fastapi.responses import PlainTextResponse

    app = FastAPI(title="reu-elicit session service")
    store = SessionStore(data_dir)
    store.rehydrate()
    app.state.store = store

    def _get(sid: str) -> Session:
        try:
            return store.get(sid)
        except KeyError:
            raise HTTPException(404, f"no session {sid}") from None

    @app.post("/api/v1/sessions", status_code=201)
    def create_session(body: CreateBody):
        try:
            session = store.create(body.procedure, body.config)
        except ConfigError as exc:
            raise HTTPException(400, str(exc)) from exc
        return {"id": session.id}

    @app.get("/api/v1/sessions/{sid}/next")
    def next_query(sid: str):
        _get(sid)
        try:
            return store.next_payload(sid)
        except SessionStateError as exc:
            raise HTTPException(409, str(exc)) from exc

    @app.post("/api/v1/sessions/{sid}/answer")
    def answer(sid: str, body: AnswerBody):
        _get(sid)
        try:
            preference = Preference(body.answer)
        except ValueError:
            raise HTTPException(400, f"bad answer {body.answer!r}") from None
        try:
            return store.submit_answer(sid, body.query_id, preference)
        except QueryMismatchError as exc:
            raise HTTPException(409, str(exc)) from exc
        except SessionStateError as exc:
            raise HTTPException(409, str(exc)) from exc

    @app.get("/api/v1/sessions/{sid}/results")
    def results(sid: str):
        _get(sid)
        try:
            return store.results(sid)
        except SessionStateError as exc:
            raise HTTPException(409, str(exc)) from exc

    @app.get("/api/v1/sessions/{sid}/transcript")
    def transcript(sid: str):
        _get(sid)
        return PlainTextResponse(
            store.transcript_text(sid), media_type="application/jsonl"
        )

    if static_dir and os.path.isdir(static_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
