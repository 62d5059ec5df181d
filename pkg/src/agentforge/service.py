"""Local HTTP gateway: agents, runs, workspaces, event bridge, licensing.

This is the process boundary between the engine and any UI. Engine-side bus
events in allow-listed namespaces and set-message output are forwarded to
connected clients over a server-sent-event stream; clients post events back
over plain POSTs. Access logs carry method, path, status, and latency —
never request or response bodies.
"""

from __future__ import annotations

import asyncio
import json
import logging
import os
import queue
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import __version__
from .engine import AgentEngine
from .errors import (
    AgentForgeError,
    BusyError,
    ProviderError,
    UnknownAgentError,
    ValidationError,
)
from .licensing import issue_trial, load_private_key, load_public_key, validate_license
from .runtime import provider_from_name
from .workspace import descriptor_to_json

access_logger = logging.getLogger("agentforge.access")
logger = logging.getLogger(__name__)

DEFAULT_HOST = "127.0.0.1"
DEFAULT_PORT = 7380
FORWARD_NAMESPACES = ("frontend", "btn")


def builtin_templates_dir() -> Path:
    return Path(__file__).parent / "builtin_templates"


@dataclass
class ServiceConfig:
    """Deployment knobs, sourced from flags or AGENTFORGE_* env vars."""

    templates_dir: Path | None = None
    provider: str = "mock"
    openai_base_url: str | None = None
    openai_api_key: str | None = None
    default_model: str = "gpt-3.5-turbo"
    license_public_key: Path | None = None
    trial_signing_key: Path | None = None
    ui_dir: Path | None = None
    forward_namespaces: tuple[str, ...] = FORWARD_NAMESPACES

    @classmethod
    def from_env(cls) -> "ServiceConfig":
        def path_or_none(name: str) -> Path | None:
            value = os.environ.get(name)
            return Path(value) if value else None

        return cls(
            templates_dir=path_or_none("AGENTFORGE_TEMPLATES_DIR"),
            provider=os.environ.get("AGENTFORGE_PROVIDER", "mock"),
            openai_base_url=os.environ.get("AGENTFORGE_OPENAI_BASE_URL"),
            openai_api_key=os.environ.get("AGENTFORGE_OPENAI_API_KEY"),
            default_model=os.environ.get("AGENTFORGE_DEFAULT_MODEL", "gpt-3.5-turbo"),
            license_public_key=path_or_none("AGENTFORGE_LICENSE_PUBLIC_KEY"),
            trial_signing_key=path_or_none("AGENTFORGE_TRIAL_SIGNING_KEY"),
            ui_dir=path_or_none("AGENTFORGE_UI_DIR"),
        )


@dataclass
class _Connection:
    messages: "queue.Queue[dict]" = field(default_factory=queue.Queue)
    seq: int = 0


class BridgeHub:
    """Fan-out of BridgeMessages to every open stream connection.

    Each connection gets its own strictly-increasing seq. set-message output
    arriving while nobody is connected is buffered (capped, oldest dropped)
    and drained to the next connection that attaches.
    """

    def __init__(self, pending_limit: int = 100):
        self._lock = threading.Lock()
        self._connections: dict[int, _Connection] = {}
        self._next_id = 0
        self._pending: list[str] = []
        self._pending_limit = pending_limit

    def attach(self) -> int:
        with self._lock:
            self._next_id += 1
            conn_id = self._next_id
            conn = _Connection()
            self._connections[conn_id] = conn
            pending, self._pending = self._pending, []
        for text in pending:
            self._deliver(conn, "frontend_message", {"text": text})
        return conn_id

    def detach(self, conn_id: int) -> None:
        with self._lock:
            self._connections.pop(conn_id, None)

    def get_queue(self, conn_id: int) -> "queue.Queue[dict] | None":
        with self._lock:
            conn = self._connections.get(conn_id)
            return conn.messages if conn else None

    def frontend_message(self, text: str) -> None:
        if not self._broadcast("frontend_message", {"text": text}):
            with self._lock:
                if len(self._pending) >= self._pending_limit:
                    self._pending.pop(0)
                    logger.warning("frontend message buffer full; dropped oldest message")
                self._pending.append(text)

    def bus_event(self, event: str, payload: Any) -> None:
        self._broadcast("event", {"event": event, "payload": _json_safe(payload)})

    def run_result(self, agent: str, session_id: str, output: str) -> None:
        self._broadcast("run_result", {"agent": agent, "session_id": session_id, "output": output})

    def _broadcast(self, kind: str, body: dict) -> bool:
        with self._lock:
            connections = list(self._connections.values())
        for conn in connections:
            self._deliver(conn, kind, body)
        return bool(connections)

    @staticmethod
    def _deliver(conn: _Connection, kind: str, body: dict) -> None:
        conn.seq += 1
        conn.messages.put({"kind": kind, "body": body, "seq": conn.seq})


def _json_safe(payload: Any) -> Any:
    try:
        json.dumps(payload)
        return payload
    except (TypeError, ValueError):
        return str(payload)


class AccessLogMiddleware:
    """Pure-ASGI access logging: method, path, status, latency. No bodies."""

    def __init__(self, app):
        self.app = app

    async def __call__(self, scope, receive, send):
        if scope["type"] != "http":
            await self.app(scope, receive, send)
            return
        start = time.perf_counter()

        async def send_logged(message):
            if message["type"] == "http.response.start":
                elapsed_ms = (time.perf_counter() - start) * 1000
                access_logger.info(
                    "%s %s %d %.1fms",
                    scope["method"], scope["path"], message["status"], elapsed_ms,
                )
            await send(message)

        await self.app(scope, receive, send_logged)


class RunRequest(BaseModel):
    input: str
    session_id: str | None = None


class EventRequest(BaseModel):
    event: str
    payload: Any = None


class TokenRequest(BaseModel):
    token: str


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def build_engine(config: ServiceConfig) -> AgentEngine:
    provider = provider_from_name(
        config.provider,
        base_url=config.openai_base_url,
        api_key=config.openai_api_key,
    )
    engine = AgentEngine(provider=provider, default_model_id=config.default_model)
    templates = config.templates_dir or builtin_templates_dir()
    if templates.is_dir():
        engine.load_directory(templates)
    return engine


def create_app(
    config: ServiceConfig | None = None,
    *,
    engine: AgentEngine | None = None,
) -> FastAPI:
    config = config or ServiceConfig.from_env()
    engine = engine or build_engine(config)
    hub = BridgeHub()
    engine.frontend_sink = hub.frontend_message
    for namespace in config.forward_namespaces:
        engine.bus.subscribe(namespace, hub.bus_event, with_event=True)

    app = FastAPI(title="agentforge", version=__version__, docs_url=None, redoc_url=None)
    app.add_middleware(AccessLogMiddleware)
    app.state.engine = engine
    app.state.hub = hub
    app.state.config = config

    @app.get("/info")
    def info():
        return {
            "version": __version__,
            "notices": [],
            "template_diagnostics": engine.template_diagnostics,
        }

    @app.get("/agents")
    def agents():
        return engine.list_agents()

    @app.get("/agents/{name}/workspace")
    def workspace(name: str):
        try:
            agent = engine.get_agent(name)
        except UnknownAgentError as exc:
            return _error(404, "not_found", str(exc))
        payload = descriptor_to_json(agent.workspace, list(agent.bindings))
        payload["agent"] = agent.name
        return payload

    @app.post("/agents/{name}/run")
    def run(name: str, request: RunRequest):
        try:
            output, session_id = engine.run(name, request.input, request.session_id)
        except UnknownAgentError as exc:
            return _error(404, "not_found", str(exc))
        except BusyError as exc:
            return _error(409, "conflict", str(exc))
        except ProviderError as exc:
            return _error(
                502, "upstream_error",
                f"provider failure ({exc.classification}): {exc}",
            )
        except AgentForgeError as exc:
            return _error(400, "invalid_input", str(exc))
        hub.run_result(name, session_id, output)
        return {"output": output, "session_id": session_id}

    @app.post("/events")
    def post_event(request: EventRequest):
        try:
            report = engine.bus.publish(request.event, request.payload)
        except ValidationError as exc:
            # Surface the problem to stream clients too; connections stay open.
            hub.frontend_message(f"rejected event {request.event!r}: {exc}")
            return _error(400, "bad_event", str(exc))
        return {"published": True, "invoked": len(report.invoked)}

    @app.get("/events/stream")
    async def stream(request: Request):
        conn_id = hub.attach()
        messages = hub.get_queue(conn_id)

        async def generate():
            try:
                yield ": connected\n\n"
                while True:
                    if await request.is_disconnected():
                        return
                    try:
                        message = messages.get_nowait()
                    except queue.Empty:
                        await asyncio.sleep(0.02)
                        continue
                    yield f"data: {json.dumps(message, ensure_ascii=False)}\n\n"
            finally:
                hub.detach(conn_id)

        return StreamingResponse(
            generate(),
            media_type="text/event-stream",
            headers={"Cache-Control": "no-cache", "X-Accel-Buffering": "no"},
        )

    @app.post("/license/validate")
    def license_validate(request: TokenRequest):
        if config.license_public_key is None:
            return _error(503, "feature_disabled", "no license public key configured")
        try:
            public_key = load_public_key(config.license_public_key)
        except (OSError, ValidationError, ValueError) as exc:
            return _error(500, "config_error", f"cannot load license public key: {exc}")
        return validate_license(request.token, public_key).to_json()

    @app.post("/trial/start")
    def trial_start():
        if config.trial_signing_key is None:
            return _error(503, "feature_disabled", "no trial signing key configured")
        try:
            private_key = load_private_key(config.trial_signing_key)
        except (OSError, ValidationError, ValueError) as exc:
            return _error(500, "config_error", f"cannot load trial signing key: {exc}")
        token, payload = issue_trial(private_key)
        return {"token": token, "payload": payload}

    if config.ui_dir is not None and config.ui_dir.is_dir():
        app.mount("/ui", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app
