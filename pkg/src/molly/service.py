"""HTTP service: stage-streaming ask endpoint, KB administration, health.

Events are streamed with server-sent-events framing: one self-describing
JSON record per `data:` line, emitted as each pipeline stage completes.
"""

from __future__ import annotations

import glob
import json
import os
import queue
import threading
import time
import uuid
from dataclasses import dataclass, fields
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel

import requests

from . import kb as kb_mod
from . import index as index_mod
from .agent import AgentConfig, run_session
from .errors import DuplicateId, MollyError
from .llm import ENV_LLM_API_KEY, ENV_LLM_BASE_URL, ENV_LLM_MODEL, LiveBackend, MockBackend, Playbook

EVENT_KINDS = (
    "perception_note",
    "retrieval_results",
    "draft",
    "reflection_verdict",
    "final_answer",
    "aborted",
)

_BOOL_VALUES = {"on": True, "true": True, "yes": True, "off": False, "false": False, "no": False}


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    kb_path: str = ""
    index_path: str = ""
    backend: str = "mock"
    playbook_path: str | None = None
    llm_base_url: str | None = None
    llm_model: str | None = None
    llm_api_key: str | None = None
    embedder: str = "hash"
    embed_base_url: str | None = None
    embed_model: str | None = None
    hash_dim: int = 256
    k: int = 3
    max_reflection_iters: int = 3
    max_perception_rounds: int = 2
    perception: bool = True
    reflection: bool = True
    session_store: str = "sessions"
    templates_dir: str | None = None
    ui_dir: str | None = None

    def validate(self) -> None:
        if not self.kb_path:
            raise ValueError("kb_path must be configured")
        if self.backend not in ("mock", "live"):
            raise ValueError("backend must be 'mock' or 'live'")
        if self.backend == "mock" and not self.playbook_path:
            raise ValueError("mock backend requires playbook_path")

    def agent_config(self) -> AgentConfig:
        return AgentConfig(
            k=self.k,
            max_reflection_iters=self.max_reflection_iters,
            max_perception_rounds=self.max_perception_rounds,
            perception=self.perception,
            reflection=self.reflection,
            templates_dir=self.templates_dir,
        )


def parse_config_file(path: str | Path) -> dict[str, str]:
    """`key = value` lines; blank lines and # comments ignored."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ValueError(f"line {lineno}: expected 'key = value'")
            key, _, value = stripped.partition("=")
            values[key.strip()] = value.strip()
    return values


def load_config(path: str | Path | None = None, env: dict | None = None) -> ServiceConfig:
    """Defaults, overridden by the config file, overridden by environment."""
    env = env if env is not None else dict(os.environ)
    config = ServiceConfig()
    if path is not None:
        raw = parse_config_file(path)
        valid = {f.name: f.type for f in fields(ServiceConfig)}
        for key, value in raw.items():
            if key not in valid:
                raise ValueError(f"unknown config key {key!r}")
            current = getattr(config, key)
            if isinstance(current, bool):
                if value.lower() not in _BOOL_VALUES:
                    raise ValueError(f"config key {key!r}: expected on/off")
                setattr(config, key, _BOOL_VALUES[value.lower()])
            elif isinstance(current, int):
                setattr(config, key, int(value))
            else:
                setattr(config, key, value)
    if env.get(ENV_LLM_BASE_URL):
        config.llm_base_url = env[ENV_LLM_BASE_URL]
    if env.get(ENV_LLM_API_KEY):
        config.llm_api_key = env[ENV_LLM_API_KEY]
    if env.get(ENV_LLM_MODEL):
        config.llm_model = env[ENV_LLM_MODEL]
    if env.get(index_mod.ENV_EMBED_BASE_URL):
        config.embed_base_url = env[index_mod.ENV_EMBED_BASE_URL]
    if env.get(index_mod.ENV_EMBED_MODEL):
        config.embed_model = env[index_mod.ENV_EMBED_MODEL]
    return config


class AppState:
    def __init__(self, config: ServiceConfig):
        config.validate()
        self.config = config
        self.kb = kb_mod.load_dataset(config.kb_path)
        self.index = self._load_or_build_index()
        self.index_stale = False
        self.reindex_lock = threading.Lock()
        self.kb_lock = threading.Lock()
        self.store_dir = Path(config.session_store)
        self.store_dir.mkdir(parents=True, exist_ok=True)
        self.live_backend: LiveBackend | None = None
        if config.backend == "live":
            self.live_backend = LiveBackend(
                config.llm_base_url or "",
                config.llm_model or "",
                api_key=config.llm_api_key,
            )

    def make_embedder(self):
        if self.config.embedder == "remote":
            return index_mod.RemoteEmbedder(
                self.config.embed_base_url or "",
                self.config.embed_model or "",
            )
        dim = self.index.dim if len(self.index) else self.config.hash_dim
        return index_mod.HashEmbedder(dim)

    def _load_or_build_index(self) -> index_mod.VectorIndex:
        path = self.config.index_path
        if path and os.path.isfile(path):
            return index_mod.load_index(path)
        embedder = index_mod.HashEmbedder(self.config.hash_dim)
        built = index_mod.build_index(((e.id, e.question) for e in self.kb), embedder)
        if path:
            index_mod.save_index(built, path)
        return built

    def make_backend(self):
        """Mock mode replays the playbook afresh for every ask, so runs are
        independent and repeatable; live mode shares one client."""
        if self.config.backend == "mock":
            return MockBackend(Playbook.from_file(self.config.playbook_path))
        return self.live_backend

    def backend_reachable(self) -> bool:
        if self.config.backend == "mock":
            return True
        if not self.config.llm_base_url:
            return False
        try:
            requests.get(self.config.llm_base_url.rstrip("/") + "/models", timeout=2)
            return True
        except requests.RequestException:
            return False

    def persist_transcript(self, transcript) -> Path:
        name = f"{transcript.session_id}-{int(time.time() * 1000)}.json"
        path = self.store_dir / name
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(transcript.to_dict(), handle, ensure_ascii=False, indent=2)
        return path

    def find_transcript(self, session_id: str) -> dict | None:
        pattern = str(self.store_dir / f"{session_id}-*.json")
        matches = sorted(glob.glob(pattern))
        if not matches:
            return None
        with open(matches[-1], encoding="utf-8") as handle:
            return json.load(handle)


class AskBody(BaseModel):
    session_id: str | None = None
    question: str = ""


def create_app(config: ServiceConfig) -> FastAPI:
    state = AppState(config)
    app = FastAPI(title="molly", version="0.1.0")
    app.state.molly = state

    @app.post("/v1/ask")
    def ask(body: AskBody):
        question = (body.question or "").strip()
        if not question:
            raise HTTPException(status_code=400, detail="question must be non-empty")
        if state.config.backend == "live" and not state.config.llm_base_url:
            raise HTTPException(status_code=503, detail="live backend is not configured")
        session_id = body.session_id or uuid.uuid4().hex
        return StreamingResponse(
            _event_stream(state, session_id, question), media_type="text/event-stream"
        )

    @app.get("/v1/transcripts/{session_id}")
    def get_transcript(session_id: str):
        transcript = state.find_transcript(session_id)
        if transcript is None:
            raise HTTPException(status_code=404, detail=f"no transcript for {session_id!r}")
        return JSONResponse(transcript)

    @app.get("/v1/kb/stats")
    def kb_stats():
        stats = kb_mod.compute_stats(state.kb)
        return JSONResponse(stats.to_dict())

    @app.post("/v1/kb/entries")
    async def kb_upload(request: Request):
        payload = (await request.body()).decode("utf-8")
        lines = [
            (lineno, line.strip())
            for lineno, line in enumerate(payload.splitlines(), start=1)
            if line.strip()
        ]
        if not lines:
            raise HTTPException(status_code=422, detail="no entries in payload")
        with state.kb_lock:
            existing = {entry.id for entry in state.kb}
            new_entries = []
            for lineno, line in lines:
                try:
                    entry = kb_mod.parse_entry(line, position=lineno)
                except MollyError as exc:
                    raise HTTPException(status_code=422, detail=str(exc))
                if entry.id in existing:
                    raise HTTPException(
                        status_code=422, detail=str(DuplicateId(entry.id, lineno))
                    )
                existing.add(entry.id)
                new_entries.append(entry)
            merged = kb_mod.KnowledgeBase(entries=state.kb.entries + tuple(new_entries))
            kb_mod.save_dataset(merged, state.config.kb_path)
            state.kb = merged
            state.index_stale = True
        return {"added": len(new_entries), "n_entries": len(merged), "index": "stale"}

    @app.post("/v1/kb/reindex")
    def kb_reindex():
        if not state.reindex_lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="reindex already running")
        try:
            embedder = (
                state.make_embedder()
                if state.config.embedder == "remote"
                else index_mod.HashEmbedder(state.config.hash_dim)
            )
            built = index_mod.build_index(((e.id, e.question) for e in state.kb), embedder)
            if state.config.index_path:
                index_mod.save_index(built, state.config.index_path)
            state.index = built  # atomic reference swap
            state.index_stale = False
        finally:
            state.reindex_lock.release()
        return {"n_items": len(state.index), "index": "fresh"}

    @app.get("/v1/healthz")
    def healthz():
        return {
            "kb_loaded": len(state.kb) > 0,
            "n_entries": len(state.kb),
            "index": "stale" if state.index_stale else "fresh",
            "backend": state.config.backend,
            "backend_reachable": state.backend_reachable(),
        }

    if config.ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app


def _event_stream(state: AppState, session_id: str, question: str):
    events: queue.Queue = queue.Queue()
    cancelled = threading.Event()

    def on_stage(kind: str, payload: dict) -> None:
        if cancelled.is_set():
            raise RuntimeError("client disconnected")
        events.put((kind, payload))

    def work() -> None:
        backend = state.make_backend()
        transcript = run_session(
            question,
            state.config.agent_config(),
            state.kb,
            state.index,
            backend,
            embedder=state.make_embedder(),
            session_id=session_id,
            on_stage=on_stage,
        )
        if transcript.aborted:
            events.put(("aborted", {"error": transcript.error}))
        else:
            events.put(
                (
                    "final_answer",
                    {"final_answer": transcript.final_answer, "resolved": transcript.resolved},
                )
            )
        state.persist_transcript(transcript)
        events.put(None)

    threading.Thread(target=work, daemon=True).start()
    seq = 0
    try:
        while True:
            item = events.get()
            if item is None:
                break
            kind, payload = item
            seq += 1
            record = {
                "session_id": session_id,
                "seq": seq,
                "kind": kind,
                "payload": payload,
                "timestamp": time.time(),
            }
            yield f"data: {json.dumps(record, ensure_ascii=False)}\n\n"
    finally:
        cancelled.set()


def serve(config: ServiceConfig) -> None:
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port)
