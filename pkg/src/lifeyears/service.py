"""JSON-over-HTTP session service for live elicitation interviews.

The store is in memory, optionally snapshotted to a JSON file after
every mutation. Session ids are 128-bit random hex strings. Mutations on
one session are serialised by a per-session lock; reads take a snapshot
under the store lock. There is no authentication: the service is meant
for a local or lab deployment behind a trusted network.
"""

from __future__ import annotations

import json
import os
import secrets
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import elicitation as el
from .elicitation_errors import (
    BadBracketError,
    InvalidQualityWeightError,
    NotConvergedError,
    SessionFinishedError,
)


@dataclass(frozen=True)
class SessionRecord:
    id: str
    state: el.SessionState
    created: str
    updated: str
    respondent: str | None = None


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def session_to_json(record: SessionRecord) -> dict[str, Any]:
    s = record.state
    data: dict[str, Any] = {
        "id": record.id,
        "kind": s.kind,
        "health_state": s.state,
        "status": s.status,
        "bracket": [s.lo, s.hi],
        "tolerance": s.tolerance,
        "history": [[value, answer] for value, answer in s.history],
        "questions_asked": s.questions_asked,
        "created": record.created,
        "updated": record.updated,
        "respondent": record.respondent,
    }
    if s.kind == el.KIND_QUALITY:
        data["base_count"] = s.base_count
    else:
        data["q_a"] = s.q_a
    if s.status == el.CONVERGED:
        est = el.estimate(s)
        data["converged_value"] = s.converged_value
        data["estimate"] = {
            "parameter": "quality_weight" if s.kind == el.KIND_QUALITY else "mixing_weight",
            "value": est.value,
            "clamped": est.clamped,
        }
    if s.status == el.INCONSISTENT:
        data["inconsistency"] = s.inconsistency
    return data


def question_to_json(q: el.TradeOffQuestion) -> dict[str, Any]:
    def side(iv: el.Intervention) -> dict[str, Any]:
        return {
            "count": iv.count,
            "health_state": iv.state,
            "productivity": iv.productivity,
            "duration_years": iv.duration_years,
        }

    return {
        "left": side(q.left),
        "right": side(q.right),
        "adjustable": q.adjustable,
        "current_value": q.current_value,
    }


def _session_from_json(data: dict[str, Any]) -> SessionRecord:
    state = el.SessionState(
        kind=data["kind"],
        state=data["health_state"],
        lo=float(data["bracket"][0]),
        hi=float(data["bracket"][1]),
        tolerance=float(data["tolerance"]),
        history=tuple((float(v), a) for v, a in data.get("history", [])),
        status=data["status"],
        converged_value=data.get("converged_value"),
        inconsistency=data.get("inconsistency"),
        base_count=float(data.get("base_count", el.DEFAULT_BASE_COUNT)),
        q_a=data.get("q_a"),
    )
    return SessionRecord(
        id=data["id"],
        state=state,
        created=data["created"],
        updated=data["updated"],
        respondent=data.get("respondent"),
    )


class SessionStore:
    def __init__(self, snapshot_path: str | os.PathLike | None = None):
        self._records: dict[str, SessionRecord] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._store_lock = threading.Lock()
        self._snapshot_path = Path(snapshot_path) if snapshot_path else None
        if self._snapshot_path and self._snapshot_path.exists():
            data = json.loads(self._snapshot_path.read_text(encoding="utf-8"))
            for entry in data.get("sessions", []):
                record = _session_from_json(entry)
                self._records[record.id] = record
                self._locks[record.id] = threading.Lock()

    def _snapshot(self) -> None:
        if not self._snapshot_path:
            return
        payload = {"sessions": [session_to_json(r) for r in self._records.values()]}
        tmp = self._snapshot_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")
        tmp.replace(self._snapshot_path)

    def create(self, state: el.SessionState, respondent: str | None) -> SessionRecord:
        record = SessionRecord(
            id=secrets.token_hex(16),
            state=state,
            created=_now(),
            updated=_now(),
            respondent=respondent,
        )
        with self._store_lock:
            self._records[record.id] = record
            self._locks[record.id] = threading.Lock()
            self._snapshot()
        return record

    def get(self, session_id: str) -> SessionRecord | None:
        with self._store_lock:
            return self._records.get(session_id)

    def all(self) -> list[SessionRecord]:
        with self._store_lock:
            return sorted(self._records.values(), key=lambda r: r.created)

    def lock_for(self, session_id: str) -> threading.Lock | None:
        with self._store_lock:
            return self._locks.get(session_id)

    def update(self, record: SessionRecord, state: el.SessionState) -> SessionRecord:
        updated = replace(record, state=state, updated=_now())
        with self._store_lock:
            self._records[record.id] = updated
            self._snapshot()
        return updated


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": code, "message": message})


def _aggregates(records: list[SessionRecord]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for kind in (el.KIND_QUALITY, el.KIND_SIGMA):
        estimates = [
            el.estimate(r.state).value
            for r in records
            if r.state.kind == kind and r.state.status == el.CONVERGED
        ]
        if estimates:
            summary = el.aggregate(estimates)
            out[kind] = {"n": summary.n, "median": summary.median, "iqr": summary.iqr}
        else:
            out[kind] = None
    return out


def create_app(
    snapshot_path: str | os.PathLike | None = None,
    cors_origin: str | None = None,
) -> FastAPI:
    app = FastAPI(title="lifeyears elicitation service")
    store = SessionStore(snapshot_path)
    app.state.store = store

    if cors_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=[cors_origin] if cors_origin != "*" else ["*"],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    async def _json_body(request: Request) -> Any:
        try:
            return json.loads(await request.body() or b"{}")
        except json.JSONDecodeError:
            return None

    @app.post("/sessions")
    async def create_session(request: Request):
        body = await _json_body(request)
        if not isinstance(body, dict):
            return _error(422, "invalid_body", "request body must be a JSON object")
        kind = body.get("kind")
        try:
            if kind == el.KIND_QUALITY:
                bracket = body.get("bracket", [el.DEFAULT_BASE_COUNT, 64_000.0])
                state = el.start_quality_session(
                    state=str(body.get("state", "impaired")),
                    lo=float(bracket[0]),
                    hi=float(bracket[1]),
                    tolerance=float(body.get("tolerance", 1e-3)),
                    base_count=float(body.get("base_count", el.DEFAULT_BASE_COUNT)),
                )
            elif kind == el.KIND_SIGMA:
                q_a = body.get("q_a")
                if q_a is None:
                    return _error(422, "invalid_body", "sigma sessions need q_a")
                bracket = body.get("bracket")
                lo = float(bracket[0]) if bracket else 0.01
                hi = float(bracket[1]) if bracket else None
                state = el.start_sigma_session(
                    q_a=float(q_a),
                    lo=lo,
                    hi=hi,
                    tolerance=float(body.get("tolerance", 1e-3)),
                    state=str(body.get("state", "impaired")),
                )
            else:
                return _error(422, "invalid_body", f"kind must be quality or sigma, got {kind!r}")
        except (BadBracketError, InvalidQualityWeightError, TypeError, ValueError) as exc:
            return _error(422, "invalid_session", str(exc))
        respondent = body.get("respondent")
        record = store.create(state, str(respondent) if respondent is not None else None)
        return JSONResponse(
            status_code=201,
            content={
                "id": record.id,
                "session": session_to_json(record),
                "question": question_to_json(el.next_question(record.state)),
            },
        )

    @app.get("/sessions")
    async def list_sessions():
        records = store.all()
        return {
            "sessions": [session_to_json(r) for r in records],
            "aggregates": _aggregates(records),
        }

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str):
        record = store.get(session_id)
        if record is None:
            return _error(404, "unknown_session", f"no session {session_id}")
        payload = {"session": session_to_json(record)}
        if record.state.status == el.ACTIVE:
            payload["question"] = question_to_json(el.next_question(record.state))
        return payload

    @app.get("/sessions/{session_id}/question")
    async def get_question(session_id: str):
        record = store.get(session_id)
        if record is None:
            return _error(404, "unknown_session", f"no session {session_id}")
        try:
            question = el.next_question(record.state)
        except SessionFinishedError as exc:
            return _error(409, "session_finished", str(exc))
        return {"question": question_to_json(question), "questions_asked": record.state.questions_asked}

    @app.post("/sessions/{session_id}/answer")
    async def post_answer(session_id: str, request: Request):
        body = await _json_body(request)
        if not isinstance(body, dict) or "answer" not in body:
            return _error(422, "invalid_body", 'body must be {"answer": ...}')
        answer = body["answer"]
        if answer not in el.ANSWERS:
            return _error(422, "invalid_body", f"answer must be one of {el.ANSWERS}")
        lock = store.lock_for(session_id)
        if lock is None:
            return _error(404, "unknown_session", f"no session {session_id}")
        with lock:
            record = store.get(session_id)
            index = body.get("index")
            if index is not None:
                index = int(index)
                asked = record.state.questions_asked
                if index < asked:
                    # duplicate delivery of an already-applied answer
                    if record.state.history[index][1] == answer:
                        return {"session": session_to_json(record), "replayed": True}
                    return _error(409, "conflicting_answer", f"answer {index} already recorded differently")
                if index > asked:
                    return _error(409, "answer_out_of_order", f"expected index {asked}, got {index}")
            try:
                new_state = el.submit_answer(record.state, answer)
            except SessionFinishedError as exc:
                return _error(409, "session_finished", str(exc))
            record = store.update(record, new_state)
        payload: dict[str, Any] = {"session": session_to_json(record)}
        if record.state.status == el.ACTIVE:
            payload["question"] = question_to_json(el.next_question(record.state))
        return payload

    @app.get("/sessions/{session_id}/estimate")
    async def get_estimate(session_id: str):
        record = store.get(session_id)
        if record is None:
            return _error(404, "unknown_session", f"no session {session_id}")
        try:
            est = el.estimate(record.state)
        except NotConvergedError as exc:
            return _error(409, "not_converged", str(exc))
        return {
            "estimate": {
                "parameter": "quality_weight"
                if record.state.kind == el.KIND_QUALITY
                else "mixing_weight",
                "value": est.value,
                "clamped": est.clamped,
            },
            "session": session_to_json(record),
        }

    return app
