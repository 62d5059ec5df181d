"""Evaluation semantics for the built-in directive set.

Every directive evaluates to text. `<text>` splices its body in order,
`<func>` runs its body for effects and discards text, buffers and memory go
through the session, `<fire>` publishes on the bus, and `<diff>` produces
hunks that `<join-diff>` formats. Structural directives (agent, preset,
workspace, ...) have no run-time meaning and refuse to evaluate.

Evaluators run inside one session's serialized execution; the only shared
mutable state they may touch is the bus, which serializes internally.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable

from .diffing import DiffHunk, eval_diff, eval_join_diff
from .directives import DirectiveSpec, Registry
from .document import Document, completion_context, insert_comment, segment, select_contextual
from .errors import (
    AgentForgeError,
    EvalError,
    PromptAssemblyError,
    SequencingError,
)
from .parser import DirectiveNode, TextSpan
from .runtime import AgentSession, ChatMessage, ModelConfig, ModelProvider, PromptBundle, call_model

if TYPE_CHECKING:
    from .bus import EventBus
    from .compiler import AgentDefinition

logger = logging.getLogger(__name__)

COMPLETION_CONTEXT_CHARS = 1000


class FrontendBuffer:
    """Holds set-message output while no frontend is attached.

    Capped at 100 entries; when full, the oldest message is dropped and a
    warning is logged (the log line never carries message content).
    """

    def __init__(self, limit: int = 100):
        self.limit = limit
        self.messages: list[str] = []

    def push(self, text: str) -> None:
        if len(self.messages) >= self.limit:
            self.messages.pop(0)
            logger.warning("frontend message buffer full; dropped oldest message")
        self.messages.append(text)

    def drain(self) -> list[str]:
        drained, self.messages = self.messages, []
        return drained


@dataclass
class EvalContext:
    """Everything one evaluation may touch; lives for a single run."""

    session: AgentSession
    registry: Registry
    agent: "AgentDefinition | None" = None
    document: Document | None = None
    bus: "EventBus | None" = None
    provider: ModelProvider | None = None
    frontend_sink: Callable[[str], None] | None = None
    frontend_buffer: FrontendBuffer = field(default_factory=FrontendBuffer)
    macro_inputs: list[str] = field(default_factory=list)

    def warn(self, message: str) -> None:
        self.session.warnings.append(message)

    def emit_frontend(self, text: str) -> None:
        if self.frontend_sink is not None:
            self.frontend_sink(text)
        else:
            self.frontend_buffer.push(text)

    def current_input(self) -> str:
        """Macro input when a predef invocation is active, else the session buffer."""
        return self.macro_inputs[-1] if self.macro_inputs else self.session.input_buffer


def eval_node(node: DirectiveNode, ctx: EvalContext) -> str:
    """Evaluate one directive node to text."""
    return _coerce(_eval(node, ctx))


def _eval(node: DirectiveNode, ctx: EvalContext) -> object:
    spec = ctx.registry.resolve(node.name)
    evaluator = _EVALUATORS.get(spec.evaluator_id)
    if evaluator is None:
        raise EvalError(
            f"<{node.name}> (line {node.line}) is structural and cannot be evaluated here"
        )
    try:
        return evaluator(node, spec, ctx)
    except AgentForgeError as exc:
        if not hasattr(exc, "node_location"):
            exc.node_location = (node.line, node.col)  # type: ignore[attr-defined]
        raise
    except Exception as exc:
        raise EvalError(f"<{node.name}> at {node.line}:{node.col}: {exc}") from exc


def _coerce(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, list) and all(isinstance(h, DiffHunk) for h in value):
        return json.dumps(
            [{"op": h.op, "tokens": list(h.tokens)} for h in value], ensure_ascii=False
        )
    return str(value)


def _splice(node: DirectiveNode, ctx: EvalContext) -> str:
    parts = []
    for item in node.body:
        if isinstance(item, TextSpan):
            parts.append(item.text)
        else:
            parts.append(_coerce(_eval(item, ctx)))
    return "".join(parts)


def _param(node: DirectiveNode, spec: DirectiveSpec, key: str) -> str | None:
    if key in node.params:
        return node.params[key]
    param = spec.param(key)
    return param.default if param is not None else None


# --- evaluators -------------------------------------------------------------


def _ev_splice(node, spec, ctx):
    return _splice(node, ctx)


def _ev_func(node, spec, ctx):
    for child in node.children():
        _eval(child, ctx)
    return ""


def _ev_copy(node, spec, ctx):
    # An empty body copies the output buffer (the post-action <copy/> idiom);
    # otherwise the spliced body result is copied.
    value = _splice(node, ctx) if node.body else ctx.session.output_buffer
    ctx.session.clipboard_buffer = value
    return ""


def _ev_submit(node, spec, ctx):
    submit_current_prompt(ctx)
    return ""


def _ev_fire(node, spec, ctx):
    event = node.params.get("event")
    if not event:
        raise EvalError("fire requires an event parameter")
    if ctx.bus is None:
        raise EvalError("fire requires an event bus")
    payload = _splice(node, ctx) or None
    ctx.bus.publish(event, payload)
    return ""


def _ev_select(node, spec, ctx):
    if ctx.document is None:
        raise EvalError("select requires a document")
    unit = _param(node, spec, "unit") or "sentence"
    offset = int(_param(node, spec, "offset") or "0")
    return select_contextual(ctx.document, unit, offset)


def _ev_input(node, spec, ctx):
    return ctx.current_input()


def _ev_output(node, spec, ctx):
    if not ctx.session.output_ready:
        raise SequencingError("output is not available before a model call")
    return ctx.session.output_buffer


def _ev_set_message(node, spec, ctx):
    ctx.emit_frontend(_splice(node, ctx))
    return ""


def _ev_store(node, spec, ctx):
    addr = node.params.get("addr", "")
    if not addr:
        raise EvalError("store requires a non-empty addr parameter")
    ctx.session.memory[addr] = _splice(node, ctx)
    return ""


def _ev_load(node, spec, ctx):
    addr = node.params.get("addr", "")
    if not addr:
        raise EvalError("load requires a non-empty addr parameter")
    if addr not in ctx.session.memory:
        ctx.warn(f'load: memory key "{addr}" is not set')
        return ""
    return ctx.session.memory[addr]


def _ev_diff(node, spec, ctx):
    unit = _param(node, spec, "unit") or "word"
    source = node.first("source")
    target = node.first("target")
    if source is None or target is None:
        missing = "source" if source is None else "target"
        raise EvalError(f"diff requires a <{missing}> child")
    return eval_diff(_splice(source, ctx), _splice(target, ctx), unit)


def _ev_join_diff(node, spec, ctx):
    fmt = _param(node, spec, "format") or "html"
    for child in node.children():
        result = _eval(child, ctx)
        if isinstance(result, list):
            return eval_join_diff(result, fmt)
    raise EvalError("join-diff requires a <diff> in its body")


def _ev_completion(node, spec, ctx):
    if ctx.document is None:
        raise EvalError("completion requires a document")
    return completion_context(ctx.document, COMPLETION_CONTEXT_CHARS)


def _ev_insert_comment(node, spec, ctx):
    if ctx.document is None:
        raise EvalError("insert-comment requires a document")
    body = _splice(node, ctx)
    if not body:
        raise EvalError("insert-comment requires non-empty content")
    doc = ctx.document
    sentences = segment(doc, "sentence")
    if sentences:
        anchor = next(
            (s for s in sentences if s.start <= doc.cursor < s.end),
            next((s for s in reversed(sentences) if s.start <= doc.cursor), sentences[0]),
        )
        start, end = anchor.start, anchor.end
    else:
        start = end = doc.cursor
    author = f"agent:{ctx.agent.name}" if ctx.agent is not None else "agent"
    ctx.document = insert_comment(doc, start, end, body, author)
    return ""


def _ev_noop(node, spec, ctx):
    return ""


def _ev_predef_macro(node, spec, ctx):
    call_input = _splice(node, ctx)
    ctx.macro_inputs.append(call_input)
    try:
        parts = []
        for item in spec.macro_body:
            if isinstance(item, TextSpan):
                parts.append(item.text)
            else:
                parts.append(_coerce(_eval(item, ctx)))
        return "".join(parts)
    finally:
        ctx.macro_inputs.pop()


_EVALUATORS: dict[str, Callable] = {
    "splice": _ev_splice,
    "func": _ev_func,
    "copy": _ev_copy,
    "submit": _ev_submit,
    "fire": _ev_fire,
    "select": _ev_select,
    "input": _ev_input,
    "output": _ev_output,
    "set_message": _ev_set_message,
    "store": _ev_store,
    "load": _ev_load,
    "diff": _ev_diff,
    "join_diff": _ev_join_diff,
    "completion": _ev_completion,
    "insert_comment": _ev_insert_comment,
    "noop": _ev_noop,
    "predef_macro": _ev_predef_macro,
}


# --- prompt assembly and submission -----------------------------------------


def assemble_prompt(prompt_node: DirectiveNode, ctx: EvalContext) -> PromptBundle:
    """Evaluate `<system>` and `<user>` bodies into a PromptBundle.

    `<input/>` inside the user body substitutes the session input buffer.
    Repeated calls with the same template, input buffer, and memory yield
    identical bundles.
    """
    user_node = prompt_node.first("user")
    if user_node is None:
        raise PromptAssemblyError("prompt requires a <user> element")
    system_node = prompt_node.first("system")
    system = _splice(system_node, ctx) if system_node is not None else ""
    user = _splice(user_node, ctx)
    model = ctx.agent.model if ctx.agent is not None else ModelConfig()
    return PromptBundle(system=system, user=user, model=model)


def submit_current_prompt(ctx: EvalContext) -> str:
    """Assemble the agent's prompt and run the model-call phase now."""
    if ctx.agent is None or ctx.agent.prompt_template is None:
        raise EvalError("submit requires an agent with a prompt")
    if ctx.provider is None:
        raise EvalError("submit requires a model provider")
    bundle = assemble_prompt(ctx.agent.prompt_template, ctx)
    return call_with_history(ctx, bundle)


def call_with_history(ctx: EvalContext, bundle: PromptBundle) -> str:
    """Call the provider and latch the output buffer.

    Conversational (chatlist) agents send their full alternating history;
    everything else sends system + current user message only.
    """
    assert ctx.agent is not None and ctx.provider is not None
    history: tuple[ChatMessage, ...] = ()
    if ctx.agent.conversational:
        history = tuple(ctx.session.chat_history)
    output = call_model(
        ctx.agent.model,
        bundle,
        ctx.provider,
        history=history,
        agent_name=ctx.agent.name,
    )
    ctx.session.output_buffer = output
    ctx.session.output_ready = True
    return output
