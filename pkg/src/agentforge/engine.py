"""Agent lifecycle execution and multi-template orchestration.

`run_agent` drives the four-step cycle on one session: pre-actions, prompt
assembly, model call, post-actions. `AgentEngine` is the long-lived object
behind the CLI and the HTTP service — it loads a template directory, keeps
compiled agents and live sessions, and owns the bus shared by every run.
"""

from __future__ import annotations

import logging
import threading
from pathlib import Path
from typing import Callable

from .bus import EventBus
from .compiler import AgentDefinition, load_agent_template
from .directives import Registry, builtin_registry
from .document import Document
from .errors import PromptAssemblyError, UnknownAgentError, ValidationError
from .evaluator import EvalContext, FrontendBuffer, assemble_prompt, call_with_history, eval_node
from .runtime import (
    AgentSession,
    ChatMessage,
    MockProvider,
    ModelProvider,
    create_session,
)

logger = logging.getLogger(__name__)

TEMPLATE_SUFFIX = ".agent.xml"


def run_agent(
    session: AgentSession,
    input_text: str,
    provider: ModelProvider,
    *,
    document: Document | None = None,
    bus: EventBus | None = None,
    frontend_sink: Callable[[str], None] | None = None,
    frontend_buffer: FrontendBuffer | None = None,
) -> str:
    """Run one full agent cycle; returns the model output.

    On any failure the session ends idle with the output buffer untouched and
    the exception re-raised carrying a `run_phase` attribute naming the phase
    that failed. A successful run appends exactly one user and one assistant
    message to the chat history.
    """
    ctx = EvalContext(
        session=session,
        registry=session.agent.registry,
        agent=session.agent,
        document=document,
        bus=bus,
        provider=provider,
        frontend_sink=frontend_sink,
        frontend_buffer=frontend_buffer or FrontendBuffer(),
    )
    return _run_with_context(session, input_text, ctx)


class AgentEngine:
    """Compiled agents, live sessions, and the shared bus for one process."""

    def __init__(
        self,
        *,
        registry: Registry | None = None,
        provider: ModelProvider | None = None,
        bus: EventBus | None = None,
        default_model_id: str = "gpt-3.5-turbo",
    ):
        self.registry = registry if registry is not None else builtin_registry()
        self.provider = provider if provider is not None else MockProvider()
        self.bus = bus if bus is not None else EventBus()
        self.default_model_id = default_model_id
        self.agents: dict[str, AgentDefinition] = {}
        self.template_diagnostics: list[str] = []
        self.frontend_sink: Callable[[str], None] | None = None
        self.frontend_buffer = FrontendBuffer()
        self._sessions: dict[str, AgentSession] = {}
        self._documents: dict[str, Document] = {}
        self._lock = threading.Lock()

    # --- templates -----------------------------------------------------

    def load_directory(self, path: str | Path) -> int:
        """Compile every *.agent.xml in a directory; bad files are skipped
        and reported through template_diagnostics (and GET /info)."""
        count = 0
        for file in sorted(Path(path).glob(f"*{TEMPLATE_SUFFIX}")):
            if self.load_template_text(file.read_text(encoding="utf-8"), filename=str(file)):
                count += 1
        return count

    def load_template_text(self, text: str, *, filename: str = "<template>") -> bool:
        definition, _, diagnostics = load_agent_template(
            text,
            self.registry,
            filename=filename,
            default_model_id=self.default_model_id,
        )
        self.template_diagnostics.extend(
            line for line in diagnostics if ": error:" in line or ": warning:" in line
        )
        if definition is None:
            logger.warning("skipping template %s: %d diagnostic(s)", filename, len(diagnostics))
            return False
        self.agents[definition.name] = definition
        return True

    def list_agents(self) -> list[dict[str, str]]:
        return [
            {"name": a.name, "icon": a.icon, "desc": a.desc}
            for a in sorted(self.agents.values(), key=lambda a: a.name)
        ]

    def get_agent(self, name: str) -> AgentDefinition:
        agent = self.agents.get(name)
        if agent is None:
            raise UnknownAgentError(f'unknown agent "{name}"')
        return agent

    # --- sessions ------------------------------------------------------

    def create_session(self, agent_name: str, *, document: Document | None = None) -> AgentSession:
        agent = self.get_agent(agent_name)
        session = create_session(agent)
        with self._lock:
            self._sessions[session.session_id] = session
            self._documents[session.session_id] = document or Document("")
        return session

    def get_session(self, session_id: str) -> AgentSession | None:
        with self._lock:
            return self._sessions.get(session_id)

    def document_for(self, session_id: str) -> Document:
        with self._lock:
            return self._documents.get(session_id, Document(""))

    def set_document(self, session_id: str, document: Document) -> None:
        with self._lock:
            self._documents[session_id] = document

    # --- runs ----------------------------------------------------------

    def run(self, agent_name: str, input_text: str, session_id: str | None = None) -> tuple[str, str]:
        """Run an agent, creating a session when none is given.

        Returns (output, session_id). The session's document may be mutated
        by directives such as insert-comment.
        """
        if session_id is None:
            session = self.create_session(agent_name)
        else:
            session = self.get_session(session_id)
            if session is None:
                raise UnknownAgentError(f'unknown session "{session_id}"')
            if session.agent.name != agent_name:
                raise ValidationError(
                    f'session "{session_id}" belongs to agent "{session.agent.name}"'
                )
        ctx_document = self.document_for(session.session_id)
        ctx = EvalContext(
            session=session,
            registry=session.agent.registry,
            agent=session.agent,
            document=ctx_document,
            bus=self.bus,
            provider=self.provider,
            frontend_sink=self.frontend_sink,
            frontend_buffer=self.frontend_buffer,
        )
        output = _run_with_context(session, input_text, ctx)
        if ctx.document is not ctx_document and ctx.document is not None:
            self.set_document(session.session_id, ctx.document)
        return output, session.session_id


def _run_with_context(session: AgentSession, input_text: str, ctx: EvalContext) -> str:
    """run_agent with a caller-built context (engine path)."""
    agent = session.agent
    session.begin_run()
    try:
        session.phase = "pre"
        session.input_buffer = input_text
        for node in agent.pre_actions:
            eval_node(node, ctx)
        session.phase = "prompted"
        if agent.prompt_template is None:
            raise PromptAssemblyError(f'agent "{agent.name}" has no prompt')
        bundle = assemble_prompt(agent.prompt_template, ctx)
        if not bundle.user:
            raise ValidationError("prompt user message is empty; agent input is required")
        session.phase = "called"
        output = call_with_history(ctx, bundle)
        session.phase = "post"
        for node in agent.post_actions:
            eval_node(node, ctx)
        session.chat_history.append(ChatMessage("user", bundle.user))
        session.chat_history.append(ChatMessage("assistant", output))
        logger.debug(
            "run complete: agent=%s input_len=%d output_len=%d",
            agent.name, len(input_text), len(output),
        )
        return output
    except Exception as exc:
        if not hasattr(exc, "run_phase"):
            exc.run_phase = session.phase  # type: ignore[attr-defined]
        raise
    finally:
        session.end_run()
