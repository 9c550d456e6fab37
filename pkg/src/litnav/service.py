"""HTTP boundary: session lifecycle, analysis endpoints, corpus upload.

The service is a thin shell over the agent engine. Shared artifacts are
immutable, so requests for different sessions run concurrently; within one
session a non-blocking lock enforces one message at a time (busy returns
409). Sessions persist as one JSON document each and are rebuilt
deterministically after a restart.
"""

from __future__ import annotations

import json
import os
import secrets
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel
from starlette.exceptions import HTTPException as StarletteHTTPException

from .agent import (
    AgentRuntime,
    IllegalTransition,
    RemoteProvider,
    ScriptedProvider,
    Session,
    SessionState,
    StubLlm,
    advance,
    approve,
    new_session,
    rebuild_artifacts,
    session_from_json,
    session_to_json,
)
from .bkg import graph_to_json
from .corpus import CorpusStore, ingest_corpus, load_corpus
from .mining import DEFAULT_PARAMS, MiningParams, representatives, topic_trend


@dataclass
class ServiceConfig:
    """Runtime configuration; from_env reads the LITNAV_* keys."""

    port: int = 8151
    provider: str = "stub"
    provider_endpoint: Optional[str] = None
    provider_key: Optional[str] = None
    corpus_path: Optional[str] = None
    data_dir: str = "./litnav_data"
    cors_origins: tuple[str, ...] = ("*",)
    max_upload_bytes: int = 8 * 1024 * 1024
    static_dir: Optional[str] = None
    params: MiningParams = DEFAULT_PARAMS

    def __post_init__(self):
        if self.provider not in ("stub", "scripted", "remote"):
            raise ValueError(f"unknown provider kind {self.provider!r}")
        if self.provider == "remote" and not self.provider_endpoint:
            raise ValueError("remote provider requires LITNAV_PROVIDER_ENDPOINT")

    @staticmethod
    def from_env(env=None) -> "ServiceConfig":
        env = os.environ if env is None else env
        static_dir = env.get("LITNAV_STATIC_DIR")
        if static_dir is None and Path("frontend/dist").is_dir():
            # serve the built web client when launched from a checkout
            static_dir = "frontend/dist"
        return ServiceConfig(
            port=int(env.get("LITNAV_PORT", "8151")),
            provider=env.get("LITNAV_PROVIDER", "stub"),
            provider_endpoint=env.get("LITNAV_PROVIDER_ENDPOINT"),
            provider_key=env.get("LITNAV_PROVIDER_KEY"),
            corpus_path=env.get("LITNAV_CORPUS"),
            data_dir=env.get("LITNAV_DATA_DIR", "./litnav_data"),
            static_dir=static_dir,
        )


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


class MessageBody(BaseModel):
    text: str = ""


class ApproveBody(BaseModel):
    corpus_id: Optional[str] = None


class Service:
    """Owns sessions, corpora, per-session locks, and persistence."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.data_dir = Path(config.data_dir)
        (self.data_dir / "sessions").mkdir(parents=True, exist_ok=True)
        (self.data_dir / "corpora").mkdir(parents=True, exist_ok=True)
        self.default_store: Optional[CorpusStore] = (
            load_corpus(config.corpus_path) if config.corpus_path else None
        )
        self.corpora: dict[str, CorpusStore] = {}
        self.sessions: dict[str, Session] = {}
        self.locks: dict[str, threading.Lock] = {}
        self.runtimes: dict[str, AgentRuntime] = {}
        self._load_persisted()

    # --- persistence ---------------------------------------------------

    def _load_persisted(self) -> None:
        for path in sorted((self.data_dir / "corpora").glob("*.jsonl")):
            self.corpora[path.stem] = load_corpus(path)
        for path in sorted((self.data_dir / "sessions").glob("*.json")):
            data = json.loads(path.read_text(encoding="utf-8"))
            session = session_from_json(data)
            self.sessions[session.id] = session
            self.locks[session.id] = threading.Lock()

    def persist(self, session: Session) -> None:
        path = self.data_dir / "sessions" / f"{session.id}.json"
        path.write_text(
            json.dumps(session_to_json(session), sort_keys=True, ensure_ascii=False, indent=1),
            encoding="utf-8",
        )

    # --- lookup and artifacts -------------------------------------------

    def _make_provider(self, cursor: int = 0):
        kind = self.config.provider
        if kind == "stub":
            return StubLlm()
        if kind == "scripted":
            return ScriptedProvider.from_file(self.data_dir / "provider_script.json", start=cursor)
        return RemoteProvider(self.config.provider_endpoint, self.config.provider_key)

    def runtime_for(self, session: Session) -> AgentRuntime:
        runtime = self.runtimes.get(session.id)
        if runtime is None:
            runtime = AgentRuntime(
                provider=self._make_provider(session.provider_calls),
                corpus=self.default_store,
                corpora=self.corpora,
                params=self.config.params,
            )
            self.runtimes[session.id] = runtime
        return runtime

    def get_session(self, sid: str) -> Session:
        session = self.sessions.get(sid)
        if session is None:
            raise ApiError(404, f"unknown session {sid}")
        return session

    def lock_for(self, sid: str) -> threading.Lock:
        return self.locks.setdefault(sid, threading.Lock())

    def ensure_artifacts(self, session: Session) -> None:
        # resumed sessions rebuild their retrieval artifacts on first use
        if (
            session.store is None
            and session.draft is not None
            and session.state in (SessionState.READY, SessionState.ANALYZING)
        ):
            rebuild_artifacts(session, self.runtime_for(session))

    def session_view(self, session: Session) -> dict:
        model = session.model
        return {
            "session_id": session.id,
            "state": session.state.value,
            "in_flight": self.lock_for(session.id).locked(),
            "draft": session.draft_text(),
            "corpus_id": session.corpus_id,
            "messages": [m.to_dict() for m in session.history],
            "counts": {
                "retrieved": len(session.store.records) if session.store else 0,
                "embedded": len(session.embeddings),
                "topics": model.k if model else 0,
            },
        }


def _error_body(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": {"code": status, "message": message}})


def create_app(config: Optional[ServiceConfig] = None) -> FastAPI:
    config = config or ServiceConfig.from_env()
    service = Service(config)
    app = FastAPI(title="litnav", docs_url=None, redoc_url=None)
    app.state.service = service
    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(ApiError)
    async def _on_api_error(request: Request, exc: ApiError):
        return _error_body(exc.status, exc.message)

    @app.exception_handler(StarletteHTTPException)
    async def _on_http_error(request: Request, exc: StarletteHTTPException):
        return _error_body(exc.status_code, str(exc.detail))

    @app.exception_handler(RequestValidationError)
    async def _on_validation_error(request: Request, exc: RequestValidationError):
        return _error_body(422, "invalid request body")

    @app.post("/api/sessions")
    def create_session():
        session = new_session()
        service.sessions[session.id] = session
        service.lock_for(session.id)
        service.persist(session)
        return {"session_id": session.id, "state": session.state.value}

    @app.get("/api/sessions/{sid}")
    def get_session(sid: str):
        session = service.get_session(sid)
        # rebuild after restart so the view's counts reflect the ready state
        service.ensure_artifacts(session)
        return service.session_view(session)

    @app.post("/api/sessions/{sid}/messages")
    def post_message(sid: str, body: MessageBody):
        session = service.get_session(sid)
        lock = service.lock_for(sid)
        if not lock.acquire(blocking=False):
            raise ApiError(409, "session is processing another message")
        try:
            if not body.text.strip():
                raise ApiError(422, "text must be non-empty")
            service.ensure_artifacts(session)
            messages = advance(session, body.text, service.runtime_for(session))
            service.persist(session)
            return {
                "messages": [m.to_dict() for m in messages],
                "state": session.state.value,
                "in_flight": False,
            }
        finally:
            lock.release()

    @app.post("/api/sessions/{sid}/approve")
    def approve_session(sid: str, body: Optional[ApproveBody] = None):
        session = service.get_session(sid)
        corpus_id = body.corpus_id if body else None
        if corpus_id and corpus_id != "default" and corpus_id not in service.corpora:
            raise ApiError(404, f"unknown corpus {corpus_id}")
        lock = service.lock_for(sid)
        if not lock.acquire(blocking=False):
            raise ApiError(409, "session is processing another message")
        try:
            try:
                messages = approve(session, service.runtime_for(session), corpus_id)
            except IllegalTransition as exc:
                raise ApiError(409, str(exc)) from None
            except KeyError as exc:
                raise ApiError(409, str(exc.args[0]) if exc.args else "no corpus available") from None
            service.persist(session)
            return {
                "messages": [m.to_dict() for m in messages],
                "state": session.state.value,
                "counts": service.session_view(session)["counts"],
            }
        finally:
            lock.release()

    def _ready_session(sid: str) -> Session:
        session = service.get_session(sid)
        service.ensure_artifacts(session)
        if session.state is not SessionState.READY:
            raise ApiError(409, f"session is not ready (state: {session.state.value})")
        return session

    @app.get("/api/sessions/{sid}/landscape")
    def get_landscape(sid: str):
        session = _ready_session(sid)
        model = session.model
        if model is None:
            raise ApiError(409, "no topic model (need at least 2 embedded papers)")
        points = [
            {
                "uid": uid,
                "x": model.projection[uid][0],
                "y": model.projection[uid][1],
                "topic": model.assignment[uid],
            }
            for uid in sorted(model.projection)
        ]
        topics = [
            {
                "id": t,
                "size": model.sizes[t],
                "terms": [[term, score] for term, score in model.terms.get(t, ())],
            }
            for t in range(model.k)
        ]
        return {
            "points": points,
            "topics": topics,
            "outlier_count": model.outlier_count,
            "degenerate": model.projection_degenerate,
        }

    @app.get("/api/sessions/{sid}/topics/{tid}")
    def get_topic(sid: str, tid: int):
        session = _ready_session(sid)
        model = session.model
        if model is None:
            raise ApiError(409, "no topic model (need at least 2 embedded papers)")
        # dict years would become JSON string keys; ship sorted pairs instead
        if tid == -1:
            return {
                "topic_id": -1,
                "size": model.outlier_count,
                "terms": [],
                "representatives": [],
                "trend": sorted(topic_trend(model, session.store, -1).items()),
            }
        if not 0 <= tid < model.k:
            raise ApiError(404, f"unknown topic {tid}")
        reps = representatives(model, session.embeddings, tid, 5)
        return {
            "topic_id": tid,
            "size": model.sizes[tid],
            "terms": [[term, score] for term, score in model.terms.get(tid, ())],
            "representatives": [
                {"uid": uid, "title": session.store.records[uid].title, "score": score}
                for uid, score in reps
            ],
            "trend": sorted(topic_trend(model, session.store, tid).items()),
        }

    @app.get("/api/sessions/{sid}/graph")
    def get_graph(sid: str):
        session = _ready_session(sid)
        if session.bkg is None:
            raise ApiError(409, "no knowledge graph yet")
        return graph_to_json(session.bkg)

    @app.post("/api/corpora")
    async def upload_corpus(request: Request):
        body = await request.body()
        if len(body) > config.max_upload_bytes:
            raise ApiError(413, f"upload exceeds {config.max_upload_bytes} bytes")
        try:
            text = body.decode("utf-8")
        except UnicodeDecodeError:
            raise ApiError(422, "body must be UTF-8 JSONL") from None
        store = ingest_corpus(text.splitlines())
        corpus_id = "c" + secrets.token_hex(8)
        service.corpora[corpus_id] = store
        (service.data_dir / "corpora" / f"{corpus_id}.jsonl").write_text(text, encoding="utf-8")
        stats = store.stats
        return {
            "corpus_id": corpus_id,
            "stats": {
                "accepted": stats.accepted,
                "rejected": stats.rejected,
                "deduplicated": stats.deduplicated,
                "rejected_by_category": dict(stats.rejected_by_category),
            },
        }

    if config.static_dir and Path(config.static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="static")

    return app


def main() -> None:
    import uvicorn

    config = ServiceConfig.from_env()
    uvicorn.run(create_app(config), host="127.0.0.1", port=config.port)


if __name__ == "__main__":
    main()
