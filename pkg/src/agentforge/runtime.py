"""Agent sessions and the pluggable model-provider layer.

Nothing in this module writes run content to disk or to log records — the
privacy contract is that user input and model output live only in session
buffers. Log statements may carry lengths, never text.

The deterministic mock provider is the test oracle: it always answers
"MOCK[<agent name>]: <user message>".
"""

from __future__ import annotations

import itertools
import json
import logging
import threading
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import httpx

from .errors import (
    AuthError,
    BusyError,
    NetworkError,
    ProviderError,
    TokenLimitError,
    ValidationError,
)

if TYPE_CHECKING:
    from .compiler import AgentDefinition

logger = logging.getLogger(__name__)

DEFAULT_MODEL_ID = "gpt-3.5-turbo"
DEFAULT_TEMPERATURE = 0.7
DEFAULT_MAX_TOKENS = 2000

PHASES = ("idle", "pre", "prompted", "called", "post")


@dataclass(frozen=True)
class ModelConfig:
    model_id: str = DEFAULT_MODEL_ID
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS

    def __post_init__(self) -> None:
        if not 0.0 <= self.temperature <= 2.0:
            raise ValidationError(
                f"temperature must be within [0, 2], got {self.temperature}"
            )
        if self.max_tokens < 1:
            raise ValidationError(f"max_tokens must be >= 1, got {self.max_tokens}")


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self) -> None:
        if self.role not in ("system", "user", "assistant"):
            raise ValidationError(f"unknown chat role {self.role!r}")
        if self.role in ("user", "assistant") and not self.content:
            raise ValidationError(f"{self.role} message content must be non-empty")


@dataclass(frozen=True)
class PromptBundle:
    system: str
    user: str
    model: ModelConfig


@dataclass(frozen=True)
class CompletionRequest:
    agent_name: str
    messages: tuple[ChatMessage, ...]
    model: ModelConfig


class ModelProvider:
    """Completion backend. `complete` must return text or raise a classified
    ProviderError subtype — never an unclassified exception."""

    id = "base"
    supports_chat = True

    def complete(self, request: CompletionRequest) -> str:
        raise NotImplementedError


class MockProvider(ModelProvider):
    """Deterministic echo used as the end-to-end oracle in tests and demos."""

    id = "mock"

    def complete(self, request: CompletionRequest) -> str:
        user_messages = [m for m in request.messages if m.role == "user"]
        if not user_messages:
            raise ProviderError("mock provider requires a user message")
        return f"MOCK[{request.agent_name}]: {user_messages[-1].content}"


class OpenAIProvider(ModelProvider):
    """OpenAI-compatible chat-completions client.

    POSTs {base_url}/chat/completions with model/messages/temperature/
    max_tokens and bearer-token auth; reads the first choice's message
    content. Credentials come from configuration, never from templates.
    """

    id = "openai"

    def __init__(
        self,
        base_url: str,
        api_key: str,
        *,
        timeout: float = 60.0,
        transport: httpx.BaseTransport | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self._api_key = api_key
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def complete(self, request: CompletionRequest) -> str:
        body = {
            "model": request.model.model_id,
            "messages": [{"role": m.role, "content": m.content} for m in request.messages],
            "temperature": request.model.temperature,
            "max_tokens": request.model.max_tokens,
        }
        try:
            response = self._client.post(
                f"{self.base_url}/chat/completions",
                json=body,
                headers={"Authorization": f"Bearer {self._api_key}"},
            )
        except httpx.HTTPError as exc:
            raise NetworkError(f"provider request failed: {exc.__class__.__name__}") from exc
        if response.status_code in (401, 403):
            raise AuthError(f"provider rejected credentials (HTTP {response.status_code})")
        if response.status_code >= 400:
            detail = _error_detail(response)
            if "context" in detail.lower() or "token" in detail.lower():
                raise TokenLimitError(detail)
            raise ProviderError(f"provider error (HTTP {response.status_code}): {detail}")
        try:
            payload = response.json()
            content = payload["choices"][0]["message"]["content"]
        except (json.JSONDecodeError, LookupError, TypeError) as exc:
            raise ProviderError("malformed provider response") from exc
        if not isinstance(content, str):
            raise ProviderError("provider returned non-text content")
        return content


def _error_detail(response: httpx.Response) -> str:
    try:
        payload = response.json()
    except json.JSONDecodeError:
        return response.text[:200]
    error = payload.get("error", payload)
    if isinstance(error, dict):
        return str(error.get("message") or error.get("code") or error)
    return str(error)


_session_counter = itertools.count(1)


@dataclass
class AgentSession:
    """Mutable runtime state of one agent instance.

    Buffers and chat history hold the only copies of run content; memory is
    a per-session string map that survives clear_session. A session executes
    at most one run at a time.
    """

    agent: "AgentDefinition"
    session_id: str
    memory: dict[str, str] = field(default_factory=dict)
    input_buffer: str = ""
    output_buffer: str = ""
    clipboard_buffer: str = ""
    chat_history: list[ChatMessage] = field(default_factory=list)
    phase: str = "idle"
    warnings: list[str] = field(default_factory=list)
    output_ready: bool = False
    _run_lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def begin_run(self) -> None:
        if not self._run_lock.acquire(blocking=False):
            raise BusyError(f"session {self.session_id} is already running")

    def end_run(self) -> None:
        self.phase = "idle"
        if self._run_lock.locked():
            self._run_lock.release()


def create_session(agent: "AgentDefinition", session_id: str | None = None) -> AgentSession:
    """Fresh session: empty buffers and memory, phase idle."""
    if session_id is None:
        session_id = f"session-{next(_session_counter)}"
    return AgentSession(agent=agent, session_id=session_id)


def clear_session(session: AgentSession) -> None:
    """Reset buffers, history, and warnings; memory is preserved."""
    session.begin_run()
    try:
        session.input_buffer = ""
        session.output_buffer = ""
        session.clipboard_buffer = ""
        session.chat_history.clear()
        session.warnings.clear()
        session.output_ready = False
    finally:
        session.end_run()


def call_model(
    config: ModelConfig,
    bundle: PromptBundle,
    provider: ModelProvider,
    *,
    history: tuple[ChatMessage, ...] = (),
    agent_name: str = "",
) -> str:
    """Send one completion request; config fields are forwarded verbatim.

    `history` (prior user/assistant turns) is inserted between the system
    message and the current user message for conversational agents.
    """
    # Defensive re-check: configs normally validate at construction.
    if not 0.0 <= config.temperature <= 2.0:
        raise ValidationError(f"temperature must be within [0, 2], got {config.temperature}")
    if config.max_tokens < 1:
        raise ValidationError(f"max_tokens must be >= 1, got {config.max_tokens}")
    if not bundle.user:
        raise ValidationError("prompt user message must be non-empty")
    messages: list[ChatMessage] = []
    if bundle.system:
        messages.append(ChatMessage("system", bundle.system))
    messages.extend(history)
    messages.append(ChatMessage("user", bundle.user))
    request = CompletionRequest(
        agent_name=agent_name, messages=tuple(messages), model=config
    )
    logger.debug(
        "model call: agent=%s model=%s messages=%d user_len=%d",
        agent_name, config.model_id, len(messages), len(bundle.user),
    )
    return provider.complete(request)


def provider_from_name(
    name: str,
    *,
    base_url: str | None = None,
    api_key: str | None = None,
) -> ModelProvider:
    """Build the provider selected by CLI flag or configuration."""
    if name == "mock":
        return MockProvider()
    if name == "openai":
        if not base_url or not api_key:
            raise ValidationError(
                "openai provider requires a base URL and API key "
                "(AGENTFORGE_OPENAI_BASE_URL / AGENTFORGE_OPENAI_API_KEY)"
            )
        return OpenAIProvider(base_url, api_key)
    raise ValidationError(f'unknown provider "{name}" (expected mock or openai)')
