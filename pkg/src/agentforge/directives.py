"""Directive registry: set groups, priorities, privileges, and resolution.

Directive names may be registered by several sets. Resolution filters out
groups above the user's privilege, then picks the spec from the
highest-priority group. Group ranks are fixed:

    privilege:  basic=0 < ui_control=1 < overleaf_interaction=2 < model_access=3
    priority:   model_access=0 < ui_control=1 < basic=2 < overleaf_interaction=3

User-defined (predef) sets rank below every built-in set of their group.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import PermissionDeniedError, UnknownDirectiveError, ValidationError
from .parser import DirectiveNode

GROUP_NAMES = ("basic", "ui_control", "overleaf_interaction", "model_access")

DEFAULT_USER_PRIVILEGE = 3  # beta behavior: every directive is accessible


@dataclass(frozen=True)
class DirectiveSetGroup:
    name: str
    priority_rank: int
    privilege_rank: int


GROUPS: dict[str, DirectiveSetGroup] = {
    "basic": DirectiveSetGroup("basic", priority_rank=2, privilege_rank=0),
    "ui_control": DirectiveSetGroup("ui_control", priority_rank=1, privilege_rank=1),
    "overleaf_interaction": DirectiveSetGroup(
        "overleaf_interaction", priority_rank=3, privilege_rank=2
    ),
    "model_access": DirectiveSetGroup("model_access", priority_rank=0, privilege_rank=3),
}


@dataclass(frozen=True)
class ParamSpec:
    key: str
    type: str = "string"  # string | int | float | bool | enum
    required: bool = False
    default: str | None = None
    choices: tuple[str, ...] = ()


@dataclass(frozen=True)
class DirectiveSpec:
    name: str
    set_id: str
    group: DirectiveSetGroup
    params: tuple[ParamSpec, ...] = ()
    dependence: str | None = None
    evaluator_id: str = "structural"
    user_defined: bool = False
    macro_body: tuple = ()  # predef expansion body (DirectiveNode | TextSpan items)

    def param(self, key: str) -> ParamSpec | None:
        for spec in self.params:
            if spec.key == key:
                return spec
        return None


@dataclass(frozen=True)
class Registry:
    """Immutable multimap of directive specs plus the caller's privilege."""

    specs: dict[str, tuple[DirectiveSpec, ...]] = field(default_factory=dict)
    user_privilege: int = DEFAULT_USER_PRIVILEGE

    def with_spec(self, spec: DirectiveSpec) -> "Registry":
        specs = dict(self.specs)
        specs[spec.name] = specs.get(spec.name, ()) + (spec,)
        return replace(self, specs=specs)

    def with_privilege(self, privilege: int) -> "Registry":
        return replace(self, user_privilege=privilege)

    def resolve(self, name: str) -> DirectiveSpec:
        return resolve_directive(name, self)


def resolve_directive(name: str, registry: Registry) -> DirectiveSpec:
    """Pick the winning spec for a name under the registry's privilege.

    Raises UnknownDirectiveError when no set registers the name at all, and
    PermissionDeniedError when candidates exist only above the user's
    privilege — tooling treats those differently.
    """
    candidates = registry.specs.get(name, ())
    if not candidates:
        raise UnknownDirectiveError(name)
    allowed = [s for s in candidates if s.group.privilege_rank <= registry.user_privilege]
    if not allowed:
        required = min(s.group.privilege_rank for s in candidates)
        raise PermissionDeniedError(name, required=required, granted=registry.user_privilege)
    allowed.sort(key=lambda s: (-s.group.priority_rank, s.user_defined, s.set_id))
    return allowed[0]


def register_predef(registry: Registry, definition: DirectiveNode) -> Registry:
    """Add a user-defined directive from a `<predef>` element.

    The new spec's evaluation splices the predef body, with `<input/>` inside
    it substituting the call site's own spliced body. Redefining a built-in
    name within the same group is rejected.
    """
    if definition.name != "predef":
        raise ValidationError(f'expected a <predef> element, got <{definition.name}>')
    name = definition.params.get("name", "").strip()
    if not name:
        raise ValidationError("predef requires a name parameter")
    group_name = definition.params.get("group", "basic")
    group = GROUPS.get(group_name)
    if group is None:
        raise ValidationError(f'predef group must be one of {GROUP_NAMES}, got "{group_name}"')
    for existing in registry.specs.get(name, ()):
        if existing.group.name == group_name and not existing.user_defined:
            raise ValidationError(
                f'predef "{name}" shadows a built-in directive in group {group_name}'
            )
    spec = DirectiveSpec(
        name=name,
        set_id=f"user.predef.{group_name}",
        group=group,
        evaluator_id="predef_macro",
        user_defined=True,
        macro_body=tuple(definition.body),
    )
    return registry.with_spec(spec)


def _enum(key: str, choices: tuple[str, ...], default: str | None = None) -> ParamSpec:
    return ParamSpec(key, type="enum", default=default, choices=choices)


_BUILTINS: list[DirectiveSpec] = []


def _builtin(
    name: str,
    set_id: str,
    group: str,
    *,
    params: tuple[ParamSpec, ...] = (),
    dependence: str | None = None,
    evaluator_id: str = "structural",
) -> None:
    _BUILTINS.append(
        DirectiveSpec(
            name=name,
            set_id=set_id,
            group=GROUPS[group],
            params=params,
            dependence=dependence,
            evaluator_id=evaluator_id,
        )
    )


# Basic.Utils — diff machinery
_builtin(
    "join-diff", "basic.utils", "basic",
    params=(_enum("format", ("html", "markdown", "latex"), "html"),),
    evaluator_id="join_diff",
)
_builtin(
    "diff", "basic.utils", "basic",
    params=(_enum("unit", ("line", "word", "letter"), "word"),),
    evaluator_id="diff",
)
_builtin("source", "basic.utils", "basic", dependence="diff", evaluator_id="splice")
_builtin("target", "basic.utils", "basic", dependence="diff", evaluator_id="splice")

# Basic.Agent — agent structure
_builtin("prompt", "basic.agent", "basic")
_builtin("system", "basic.agent", "basic", dependence="prompt", evaluator_id="splice")
_builtin("user", "basic.agent", "basic", dependence="prompt", evaluator_id="splice")
_builtin("pre-action", "basic.agent", "basic", dependence="agent")
_builtin("post-action", "basic.agent", "basic", dependence="agent")
_builtin("desc", "basic.agent", "basic", evaluator_id="splice")
_builtin(
    "agent", "basic.agent", "basic",
    params=(ParamSpec("name", required=True),),
)
_builtin(
    "icon", "basic.agent", "basic",
    params=(ParamSpec("mdi", required=True),),
)

# Basic.Basic — composition and bus access
_builtin("func", "basic.basic", "basic", evaluator_id="func")
_builtin("text", "basic.basic", "basic", evaluator_id="splice")
_builtin("copy", "basic.basic", "basic", evaluator_id="copy")
_builtin("submit", "basic.basic", "basic", evaluator_id="submit")
_builtin(
    "fire", "basic.basic", "basic",
    params=(ParamSpec("event"),),
    evaluator_id="fire",
)
_builtin(
    "select", "basic.basic", "basic",
    params=(
        _enum("unit", ("paragraph", "section", "sentence", "word"), "sentence"),
        ParamSpec("offset", type="int", default="0"),
    ),
    evaluator_id="select",
)
_builtin(
    "predef", "basic.basic", "basic",
    params=(ParamSpec("name", required=True), _enum("group", GROUP_NAMES, "basic")),
    evaluator_id="noop",
)

# Basic.Buffer — session buffers and memory
_builtin("input", "basic.buffer", "basic", evaluator_id="input")
_builtin("output", "basic.buffer", "basic", evaluator_id="output")
_builtin("set-message", "basic.buffer", "basic", evaluator_id="set_message")
_builtin(
    "store", "basic.buffer", "basic",
    params=(ParamSpec("addr"),),
    evaluator_id="store",
)
_builtin(
    "load", "basic.buffer", "basic",
    params=(ParamSpec("addr"),),
    evaluator_id="load",
)

# Model Access
_builtin(
    "model", "model_access.model", "model_access",
    params=(
        ParamSpec("temperature", type="float", default="0.7"),
        ParamSpec("max-tokens", type="int", default="2000"),
    ),
    dependence="agent",
)

# UI Control
_builtin("workspace", "ui_control.ui", "ui_control")
_builtin("preset", "ui_control.ui", "ui_control", dependence="agent")
_builtin("textarea", "ui_control.ui", "ui_control", dependence="workspace")
_builtin("inputarea", "ui_control.ui", "ui_control", dependence="workspace")
_builtin("chatlist", "ui_control.ui", "ui_control", dependence="workspace")
_builtin("toolbar", "ui_control.ui", "ui_control", dependence="workspace")
_builtin("actions", "ui_control.ui", "ui_control")
_builtin("bindings", "ui_control.ui", "ui_control", dependence="preset")
_builtin(
    "action", "ui_control.ui", "ui_control",
    params=(
        _enum("preset", ("copy", "clear", "send-input")),
        ParamSpec("icon"),
        ParamSpec("desc"),
        ParamSpec("bind"),
    ),
    dependence="actions",
)
_builtin(
    "richarea", "ui_control.ui", "ui_control",
    params=(
        _enum("mode", ("render", "editor"), "render"),
        ParamSpec("switch", required=True),
    ),
    dependence="workspace",
)
_builtin(
    "keydown", "ui_control.ui", "ui_control",
    params=(
        _enum("scope", ("global", "window", "content"), "window"),
        ParamSpec("key"),
        ParamSpec("present", type="bool", default="false"),
        _enum("preset", ("copy", "clear", "send-input")),
    ),
    dependence="bindings",
)

# Overleaf Interaction
_builtin("completion", "overleaf.editor", "overleaf_interaction", evaluator_id="completion")
_builtin(
    "insert-comment", "overleaf.editor", "overleaf_interaction",
    evaluator_id="insert_comment",
)


def builtin_registry(user_privilege: int = DEFAULT_USER_PRIVILEGE) -> Registry:
    """Registry holding every built-in directive set."""
    specs: dict[str, tuple[DirectiveSpec, ...]] = {}
    for spec in _BUILTINS:
        specs[spec.name] = specs.get(spec.name, ()) + (spec,)
    return Registry(specs=specs, user_privilege=user_privilege)
