"""Compile validated `<agent>` trees into executable AgentDefinitions.

Compilation extracts the static pieces — name, icon, description, model
config, workspace preset — and keeps the prompt subtree and pre/post action
bodies as directive trees for the evaluator. The registry the template was
validated against (including any predefs it introduced) travels with the
definition so runs resolve exactly what validation saw.
"""

from __future__ import annotations

from dataclasses import dataclass

from .directives import Registry, register_predef
from .errors import CompileError, TemplateParseError, ValidationError
from .parser import DirectiveNode, parse_template
from .runtime import ModelConfig
from .validation import ValidationReport, validate_tree
from .workspace import KeyBinding, WorkspaceDescriptor, build_workspace

SINGLETON_CHILDREN = ("icon", "desc", "model", "preset", "prompt")


@dataclass(frozen=True)
class AgentDefinition:
    """A compiled agent template, ready to run in sessions."""

    name: str
    icon: str
    desc: str
    model: ModelConfig
    workspace: WorkspaceDescriptor
    bindings: tuple[KeyBinding, ...]
    prompt_template: DirectiveNode | None
    pre_actions: tuple[DirectiveNode, ...]
    post_actions: tuple[DirectiveNode, ...]
    registry: Registry

    @property
    def conversational(self) -> bool:
        """Chatlist agents send their full alternating history to the model."""
        return self.workspace.has("chatlist")


def compile_agent(
    root: DirectiveNode,
    registry: Registry,
    *,
    default_model_id: str = "gpt-3.5-turbo",
) -> AgentDefinition:
    """Build an AgentDefinition from a validated `<agent>` root."""
    if root.name != "agent":
        raise CompileError(f"template root must be <agent>, got <{root.name}>")
    name = root.params.get("name", "").strip()
    if not name:
        raise CompileError("agent requires a name parameter")
    for child_name in SINGLETON_CHILDREN:
        if len(root.find_all(child_name)) > 1:
            raise CompileError(f"agent may contain at most one <{child_name}>")

    icon_node = root.first("icon")
    icon = icon_node.params.get("mdi", "") if icon_node is not None else ""
    desc_node = root.first("desc")
    desc = desc_node.text_content() if desc_node is not None else ""
    model = _model_config(root.first("model"), default_model_id)

    preset = root.first("preset")
    if preset is not None:
        workspace, bindings = build_workspace(preset)
    else:
        workspace, bindings = WorkspaceDescriptor(), []

    return AgentDefinition(
        name=name,
        icon=icon,
        desc=desc,
        model=model,
        workspace=workspace,
        bindings=tuple(bindings),
        prompt_template=root.first("prompt"),
        pre_actions=_action_bodies(root, "pre-action"),
        post_actions=_action_bodies(root, "post-action"),
        registry=registry,
    )


def _model_config(node: DirectiveNode | None, default_model_id: str) -> ModelConfig:
    if node is None:
        return ModelConfig(model_id=default_model_id)
    model_id = node.text_content().strip() or default_model_id
    try:
        temperature = float(node.params.get("temperature", "0.7"))
        max_tokens = int(node.params.get("max-tokens", "2000"))
        return ModelConfig(model_id=model_id, temperature=temperature, max_tokens=max_tokens)
    except (ValueError, ValidationError) as exc:
        raise CompileError(f"invalid model configuration: {exc}") from exc


def _action_bodies(root: DirectiveNode, kind: str) -> tuple[DirectiveNode, ...]:
    # Text inside action elements is ignored, like <func> semantics.
    nodes: list[DirectiveNode] = []
    for action in root.find_all(kind):
        nodes.extend(action.children())
    return tuple(nodes)


def registry_with_predefs(root: DirectiveNode, registry: Registry) -> Registry:
    """Extend a registry with every `<predef>` declared directly under the root."""
    for predef in root.find_all("predef"):
        registry = register_predef(registry, predef)
    return registry


def load_agent_template(
    text: str,
    registry: Registry,
    *,
    filename: str = "<template>",
    default_model_id: str = "gpt-3.5-turbo",
) -> tuple[AgentDefinition | None, ValidationReport, list[str]]:
    """Full parse -> predef registration -> validate -> compile pipeline.

    Returns (definition, report, diagnostics). The definition is None when
    parsing fails, validation finds errors, or compilation fails; the
    diagnostics list carries `file:line:col: severity: message` lines for
    everything that went wrong.
    """
    report = ValidationReport()
    try:
        root = parse_template(text, filename=filename)
    except TemplateParseError as exc:
        return None, report, [f"{filename}:{exc.line}:{exc.col}: error: {exc.message}"]
    try:
        registry = registry_with_predefs(root, registry)
    except ValidationError as exc:
        return None, report, [f"{filename}:{root.line}:{root.col}: error: {exc}"]
    report = validate_tree(root, registry)
    diagnostics = report.format(filename)
    if not report.is_ok:
        return None, report, diagnostics
    try:
        definition = compile_agent(root, registry, default_model_id=default_model_id)
    except (CompileError, ValidationError) as exc:
        diagnostics.append(f"{filename}:{root.line}:{root.col}: error: {exc}")
        return None, report, diagnostics
    return definition, report, diagnostics
