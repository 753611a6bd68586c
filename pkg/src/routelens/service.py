"""HTTP API over workspaces, synthesis loops, and disambiguation sessions.

State handling: each workspace is a single JSON file under the data
directory, written atomically (temp file + rename). Only inputs are
persisted (config text, loop requests, snippet text, recorded answers);
sessions are reconstructed on load by replaying their answer log through
the deterministic disambiguation engine, which doubles as crash recovery.
"""

from __future__ import annotations

import difflib
import hashlib
import json
import os
import tempfile
import threading

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .disambig import (
    DisambiguationSession,
    Inconclusive,
    InsertionProblem,
    SessionFinished,
    answer as apply_answer,
    finish_session,
    session_to_dict,
    start_session,
)
from .model import validate_config
from .parser import ParseFailure, parse_config, parse_stanza_snippet, print_config
from .engine import overlap_census
from .synth import (
    FAULT_KINDS,
    FaultyPlugin,
    HttpPlugin,
    ScriptedPlugin,
    SynthesisRequest,
    run_repair_loop,
)


def _error(status: int, message: str, field: str = None):
    detail = {"message": message}
    if field:
        detail["field"] = field
    return HTTPException(status_code=status, detail=detail)


def _parse_errors_detail(exc: ParseFailure):
    return {
        "message": "parse failed",
        "errors": [
            {"line": e.span.line, "message": e.message, "text": e.text}
            for e in exc.errors
        ],
    }


# ---------------------------------------------------------------------------
# Persistent store
# ---------------------------------------------------------------------------

class WorkspaceStore:
    """One JSON document per workspace; atomic writes; id indexes are
    rebuilt by scanning the data directory on startup."""

    def __init__(self, data_dir: str):
        self.data_dir = data_dir
        os.makedirs(data_dir, exist_ok=True)
        self._lock = threading.Lock()
        self._session_index = {}  # session id -> workspace id
        for ws_id in self.workspace_ids():
            doc = self.load(ws_id)
            for sid in doc.get("sessions", {}):
                self._session_index[sid] = ws_id

    def _path(self, ws_id: str) -> str:
        return os.path.join(self.data_dir, f"{ws_id}.json")

    def workspace_ids(self):
        return sorted(
            name[:-5]
            for name in os.listdir(self.data_dir)
            if name.endswith(".json")
        )

    def exists(self, ws_id: str) -> bool:
        return os.path.exists(self._path(ws_id))

    def load(self, ws_id: str) -> dict:
        with open(self._path(ws_id), encoding="utf-8") as fh:
            return json.load(fh)

    def save(self, doc: dict) -> None:
        path = self._path(doc["id"])
        fd, tmp = tempfile.mkstemp(dir=self.data_dir, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(doc, fh, indent=2)
                fh.write("\n")
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        with self._lock:
            for sid in doc.get("sessions", {}):
                self._session_index[sid] = doc["id"]

    def workspace_for_session(self, sid: str):
        return self._session_index.get(sid)

    def new_workspace_id(self, config_text: str) -> str:
        digest = hashlib.sha256(config_text.encode()).hexdigest()[:12]
        ws_id = f"ws-{digest}"
        n = 1
        while self.exists(ws_id):
            ws_id = f"ws-{digest}-{n}"
            n += 1
        return ws_id

    @staticmethod
    def derived_id(prefix: str, ws_id: str, counter: int) -> str:
        digest = hashlib.sha256(f"{ws_id}:{prefix}:{counter}".encode()).hexdigest()
        return f"{prefix}-{digest[:16]}"


# ---------------------------------------------------------------------------
# Session reconstruction (audit-log replay)
# ---------------------------------------------------------------------------

def rebuild_session(doc: dict, sess: dict) -> DisambiguationSession:
    """Recompute a session from its persisted inputs and answer log."""
    config = parse_config(doc["configText"])
    snippet = parse_stanza_snippet(sess["snippetText"])
    problem = InsertionProblem(config, sess["targetMap"], snippet)
    session = start_session(problem)
    for choice in sess["answers"]:
        session = apply_answer(session, choice)
    return session


def _session_payload(sid: str, session: DisambiguationSession) -> dict:
    payload = {"sessionId": sid, **session_to_dict(session)}
    if session.state == "done":
        problem = session.problem
        new_config, _ = finish_session(session)
        before = print_config(problem.config)
        after = print_config(new_config)
        payload["result"] = {
            "configText": after,
            "diff": "".join(
                difflib.unified_diff(
                    before.splitlines(keepends=True),
                    after.splitlines(keepends=True),
                    fromfile="before",
                    tofile="after",
                )
            ),
        }
    return payload


# ---------------------------------------------------------------------------
# Request bodies
# ---------------------------------------------------------------------------

class CreateWorkspaceBody(BaseModel):
    configText: str


class PluginSpec(BaseModel):
    kind: str = "scripted"
    fixtures: list = []
    url: str = ""
    fault: str = "match-all"
    badAttempts: int = 1


class SynthesizeBody(BaseModel):
    intent: str
    kind: str = "routeMap"
    plugin: PluginSpec = PluginSpec()
    threshold: int = 3


class ConfirmBody(BaseModel):
    loopId: str
    approved: bool


class DisambiguateBody(BaseModel):
    targetMap: str
    snippet: str


class AnswerBody(BaseModel):
    choice: str


def build_plugin(spec: PluginSpec):
    if spec.kind == "scripted":
        return ScriptedPlugin(spec.fixtures)
    if spec.kind == "faulty":
        if spec.fault not in FAULT_KINDS:
            raise _error(422, f"unknown fault {spec.fault!r}", field="plugin.fault")
        return FaultyPlugin(
            ScriptedPlugin(spec.fixtures), spec.fault, spec.badAttempts
        )
    if spec.kind == "http":
        if not spec.url:
            raise _error(422, "http plugin requires a url", field="plugin.url")
        return HttpPlugin(spec.url)
    raise _error(422, f"unknown plugin kind {spec.kind!r}", field="plugin.kind")


# ---------------------------------------------------------------------------
# App factory
# ---------------------------------------------------------------------------

def create_app(data_dir: str = None, ui_dir: str = None) -> FastAPI:
    if data_dir is None:
        data_dir = os.environ.get("ROUTELENS_DATA", os.path.join(os.getcwd(), "data"))
    store = WorkspaceStore(data_dir)
    app = FastAPI(title="routelens")
    app.state.store = store

    def load_or_404(ws_id: str) -> dict:
        if not store.exists(ws_id):
            raise _error(404, f"no workspace {ws_id!r}")
        return store.load(ws_id)

    @app.post("/workspaces", status_code=201)
    def create_workspace(body: CreateWorkspaceBody):
        try:
            config = parse_config(body.configText)
        except ParseFailure as exc:
            raise HTTPException(status_code=422, detail=_parse_errors_detail(exc))
        diagnostics = validate_config(config)
        ws_id = store.new_workspace_id(body.configText)
        doc = {
            "id": ws_id,
            "configText": body.configText,
            "counters": {"loop": 0, "session": 0},
            "loops": {},
            "sessions": {},
        }
        store.save(doc)
        return {
            "id": ws_id,
            "diagnostics": [
                {"code": d.code, "object": d.obj, "message": d.message}
                for d in diagnostics
            ],
        }

    @app.get("/workspaces/{ws_id}")
    def get_workspace(ws_id: str):
        doc = load_or_404(ws_id)
        return {
            "id": doc["id"],
            "configText": doc["configText"],
            "loops": {
                lid: {k: v for k, v in loop.items() if k != "history"}
                for lid, loop in doc["loops"].items()
            },
            "sessions": sorted(doc["sessions"]),
        }

    @app.post("/workspaces/{ws_id}/synthesize")
    def synthesize(ws_id: str, body: SynthesizeBody):
        doc = load_or_404(ws_id)
        if body.threshold < 1:
            raise _error(422, "threshold must be >= 1", field="threshold")
        plugin = build_plugin(body.plugin)
        request = SynthesisRequest(intent=body.intent, kind=body.kind)
        outcome = run_repair_loop(request, plugin, body.threshold)
        doc["counters"]["loop"] += 1
        loop_id = store.derived_id("loop", ws_id, doc["counters"]["loop"])
        doc["loops"][loop_id] = {
            "intent": body.intent,
            "status": outcome.status,
            "attempts": outcome.attempts,
            "snippet": outcome.snippet,
            "specText": outcome.spec_text,
            "lastFeedback": outcome.last_feedback,
            "confirmation": "pending" if outcome.verified else "n/a",
            "history": [list(h) for h in outcome.history],
        }
        store.save(doc)
        return {
            "loopId": loop_id,
            "status": outcome.status,
            "attempts": outcome.attempts,
            "snippet": outcome.snippet,
            "spec": json.loads(outcome.spec_text) if outcome.spec_text else None,
            "lastFeedback": outcome.last_feedback,
            "history": [
                {"snippet": s, "feedback": f} for s, f in outcome.history
            ],
        }

    @app.post("/workspaces/{ws_id}/confirm-spec")
    def confirm_spec(ws_id: str, body: ConfirmBody):
        doc = load_or_404(ws_id)
        loop = doc["loops"].get(body.loopId)
        if loop is None:
            raise _error(404, f"no loop {body.loopId!r}", field="loopId")
        if loop["status"] != "verified":
            raise _error(409, "only verified loops can be confirmed")
        if loop["confirmation"] != "pending":
            raise _error(409, f"loop already {loop['confirmation']}")
        loop["confirmation"] = "approved" if body.approved else "rejected"
        store.save(doc)
        return {"loopId": body.loopId, "confirmation": loop["confirmation"]}

    @app.post("/workspaces/{ws_id}/disambiguate", status_code=201)
    def disambiguate(ws_id: str, body: DisambiguateBody):
        doc = load_or_404(ws_id)
        config = parse_config(doc["configText"])
        if body.targetMap not in config.route_maps:
            raise _error(404, f"no route-map {body.targetMap!r}", field="targetMap")
        try:
            snippet = parse_stanza_snippet(body.snippet)
        except ParseFailure as exc:
            raise HTTPException(status_code=422, detail=_parse_errors_detail(exc))
        problem = InsertionProblem(config, body.targetMap, snippet)
        try:
            session = start_session(problem)
        except Inconclusive as exc:
            raise _error(409, f"overlap analysis undecided for stanzas {exc.seqs}")
        doc["counters"]["session"] += 1
        sid = store.derived_id("sess", ws_id, doc["counters"]["session"])
        doc["sessions"][sid] = {
            "targetMap": body.targetMap,
            "snippetText": body.snippet,
            "answers": [],
        }
        store.save(doc)
        return _session_payload(sid, session)

    @app.get("/workspaces/{ws_id}/overlaps")
    def overlaps(ws_id: str, includeTrivial: bool = True):
        doc = load_or_404(ws_id)
        config = parse_config(doc["configText"])
        report = overlap_census(config)
        return json.loads(report.to_json(include_trivial=includeTrivial))

    def find_session(sid: str):
        ws_id = store.workspace_for_session(sid)
        if ws_id is None or not store.exists(ws_id):
            raise _error(404, f"no session {sid!r}")
        doc = store.load(ws_id)
        if sid not in doc["sessions"]:
            raise _error(404, f"no session {sid!r}")
        return doc

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        doc = find_session(sid)
        session = rebuild_session(doc, doc["sessions"][sid])
        return _session_payload(sid, session)

    @app.post("/sessions/{sid}/answer")
    def answer_session(sid: str, body: AnswerBody):
        doc = find_session(sid)
        session = rebuild_session(doc, doc["sessions"][sid])
        try:
            session = apply_answer(session, body.choice)
        except SessionFinished:
            raise _error(409, "session already finished")
        except ValueError as exc:
            raise _error(422, str(exc), field="choice")
        doc["sessions"][sid]["answers"].append(body.choice)
        store.save(doc)
        return _session_payload(sid, session)

    if ui_dir and os.path.isdir(ui_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
