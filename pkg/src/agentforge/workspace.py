"""UI-neutral workspace descriptors built from `<preset>` subtrees.

A workspace is an ordered list of components — toolbar, a single primary
display area (textarea, chatlist, or richarea), optional input areas, and
action-button bars — plus the keyboard bindings declared under `<bindings>`.
The descriptor is what the HTTP workspace endpoint serializes and what the
browser UI renders; it carries no engine internals.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bus import KeyChord, encode_key_chord, parse_key_chord
from .errors import ValidationError
from .parser import DirectiveNode

PRIMARY_AREAS = ("textarea", "chatlist", "richarea")
ACTION_PRESETS = ("copy", "clear", "send-input")


@dataclass(frozen=True)
class ActionButton:
    """A button: either a preset behavior or a directive body to run."""

    preset: str | None = None
    icon: str | None = None
    desc: str | None = None
    bind: str | None = None
    func: tuple[DirectiveNode, ...] = ()

    def __post_init__(self) -> None:
        if self.preset is None and not self.func:
            raise ValidationError("action needs a preset or a directive body")
        if self.preset is not None and self.preset not in ACTION_PRESETS:
            raise ValidationError(
                f"action preset must be one of {ACTION_PRESETS}, got {self.preset!r}"
            )


@dataclass(frozen=True)
class KeyBinding:
    chord: KeyChord
    preset: str | None = None
    body: tuple[DirectiveNode, ...] = ()
    present_only: bool = False

    @property
    def event(self) -> str:
        return encode_key_chord(self.chord)


@dataclass(frozen=True)
class WorkspaceComponent:
    kind: str
    actions: tuple[ActionButton, ...] = ()
    mode: str | None = None
    switch_event: str | None = None


@dataclass(frozen=True)
class WorkspaceDescriptor:
    components: tuple[WorkspaceComponent, ...] = ()

    def has(self, kind: str) -> bool:
        return any(c.kind == kind for c in self.components)

    @property
    def kinds(self) -> tuple[str, ...]:
        return tuple(c.kind for c in self.components)


def build_workspace(preset_node: DirectiveNode) -> tuple[WorkspaceDescriptor, list[KeyBinding]]:
    """Map a validated `<preset>` subtree onto descriptor + key bindings.

    Workspace children become components in document order. More than one
    primary display area is rejected.
    """
    workspaces = preset_node.find_all("workspace")
    if len(workspaces) > 1:
        raise ValidationError("preset may contain at most one <workspace>")
    components: list[WorkspaceComponent] = []
    if workspaces:
        primary_count = 0
        for child in workspaces[0].children():
            component = _component(child)
            if component is None:
                continue
            if component.kind in PRIMARY_AREAS:
                primary_count += 1
                if primary_count > 1:
                    raise ValidationError(
                        "workspace may contain at most one primary display area "
                        f"({', '.join(PRIMARY_AREAS)})"
                    )
            components.append(component)
    bindings: list[KeyBinding] = []
    for bindings_node in preset_node.find_all("bindings"):
        for keydown in bindings_node.find_all("keydown"):
            bindings.append(_key_binding(keydown))
    return WorkspaceDescriptor(components=tuple(components)), bindings


def _component(node: DirectiveNode) -> WorkspaceComponent | None:
    if node.name == "toolbar":
        return WorkspaceComponent(kind="toolbar", actions=_buttons_under(node))
    if node.name == "actions":
        return WorkspaceComponent(kind="actions", actions=_buttons_in(node))
    if node.name in ("textarea", "chatlist", "inputarea"):
        return WorkspaceComponent(kind=node.name)
    if node.name == "richarea":
        return WorkspaceComponent(
            kind="richarea",
            mode=node.params.get("mode", "render"),
            switch_event=node.params.get("switch"),
        )
    return None


def _buttons_under(toolbar: DirectiveNode) -> tuple[ActionButton, ...]:
    buttons: list[ActionButton] = []
    for actions in toolbar.find_all("actions"):
        buttons.extend(_buttons_in(actions))
    return tuple(buttons)


def _buttons_in(actions: DirectiveNode) -> tuple[ActionButton, ...]:
    return tuple(
        ActionButton(
            preset=child.params.get("preset"),
            icon=child.params.get("icon"),
            desc=child.params.get("desc"),
            bind=child.params.get("bind"),
            func=tuple(child.children()),
        )
        for child in actions.find_all("action")
    )


def _key_binding(keydown: DirectiveNode) -> KeyBinding:
    key = keydown.params.get("key")
    if not key:
        raise ValidationError("keydown requires a key parameter")
    scope = keydown.params.get("scope", "window")
    chord = parse_key_chord(key, scope=scope)
    return KeyBinding(
        chord=chord,
        preset=keydown.params.get("preset"),
        body=tuple(keydown.children()),
        present_only=keydown.params.get("present", "false").lower() == "true",
    )


def descriptor_to_json(descriptor: WorkspaceDescriptor, bindings: list[KeyBinding]) -> dict:
    """JSON-ready form used by the workspace endpoint and the UI."""
    components = []
    for comp in descriptor.components:
        entry: dict = {"kind": comp.kind}
        if comp.kind in ("toolbar", "actions"):
            entry["actions"] = [_button_json(b) for b in comp.actions]
        if comp.kind == "richarea":
            entry["mode"] = comp.mode
            entry["switch_event"] = comp.switch_event
        components.append(entry)
    return {
        "components": components,
        "bindings": [
            {
                "scope": b.chord.scope,
                "key": b.chord.key,
                "modifiers": [m for m in ("control", "shift", "alt", "meta") if m in b.chord.modifiers],
                "event": b.event,
                "preset": b.preset,
                "present_only": b.present_only,
            }
            for b in bindings
        ],
    }


def _button_json(button: ActionButton) -> dict:
    entry: dict = {}
    if button.preset:
        entry["preset"] = button.preset
    if button.icon:
        entry["icon"] = button.icon
    if button.desc:
        entry["desc"] = button.desc
    if button.bind:
        entry["bind"] = button.bind
    if button.func:
        entry["func"] = True
    return entry
