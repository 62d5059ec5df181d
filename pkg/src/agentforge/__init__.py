"""agentforge: XML directive templates compiled into runnable writing agents.

The pieces compose bottom-up: a scoped event bus, a diff engine, a LaTeX
document bridge, the template parser/registry/validator/compiler, the agent
runtime with pluggable model providers, and a local HTTP gateway plus CLI on
top.
"""

__version__ = "0.1.0"

from .bus import (
    DeliveryReport,
    EventBus,
    KeyChord,
    ScopedEvent,
    Subscription,
    encode_key_chord,
    expand_event,
    parse_key_chord,
)
from .compiler import AgentDefinition, compile_agent, load_agent_template
from .diffing import DiffHunk, eval_diff, eval_join_diff
from .directives import (
    DirectiveSetGroup,
    DirectiveSpec,
    Registry,
    builtin_registry,
    register_predef,
    resolve_directive,
)
from .document import (
    Comment,
    Document,
    Segment,
    completion_context,
    insert_comment,
    load_document,
    save_document,
    segment,
    select_contextual,
)
from .engine import AgentEngine, run_agent
from .evaluator import EvalContext, assemble_prompt, eval_node
from .parser import DirectiveNode, TextSpan, parse_template, serialize
from .runtime import (
    AgentSession,
    ChatMessage,
    MockProvider,
    ModelConfig,
    ModelProvider,
    OpenAIProvider,
    PromptBundle,
    call_model,
    clear_session,
    create_session,
)
from .validation import ValidationReport, validate_tree
from .workspace import ActionButton, KeyBinding, WorkspaceDescriptor, build_workspace

__all__ = [
    "__version__",
    "ActionButton",
    "AgentDefinition",
    "AgentEngine",
    "AgentSession",
    "ChatMessage",
    "Comment",
    "DeliveryReport",
    "DiffHunk",
    "DirectiveNode",
    "DirectiveSetGroup",
    "DirectiveSpec",
    "Document",
    "EvalContext",
    "EventBus",
    "KeyBinding",
    "KeyChord",
    "MockProvider",
    "ModelConfig",
    "ModelProvider",
    "OpenAIProvider",
    "PromptBundle",
    "Registry",
    "ScopedEvent",
    "Segment",
    "Subscription",
    "TextSpan",
    "ValidationReport",
    "WorkspaceDescriptor",
    "assemble_prompt",
    "build_workspace",
    "builtin_registry",
    "call_model",
    "clear_session",
    "compile_agent",
    "completion_context",
    "create_session",
    "encode_key_chord",
    "eval_diff",
    "eval_join_diff",
    "eval_node",
    "expand_event",
    "insert_comment",
    "load_agent_template",
    "load_document",
    "parse_key_chord",
    "parse_template",
    "register_predef",
    "resolve_directive",
    "run_agent",
    "save_document",
    "segment",
    "select_contextual",
    "serialize",
    "validate_tree",
]
