"""Hierarchically scoped publish-subscribe bus and keyboard chord encoding.

Event strings are dot-separated lowercase segments. Publishing an event
triggers subscribers registered on every scope prefix of the event (shortest
first), then on the ".finally" variant of each prefix (longest first), so
cleanup handlers always run last. Publishing "layout.switch" invokes, in
order, the patterns::

    "", "layout", "layout.switch",
    "layout.switch.finally", "layout.finally", "finally"

Keyboard shortcuts ride on the same bus: pressing Ctrl+Shift+B publishes
"window.keydown.control.shift.b".
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import ValidationError

_SEGMENT_RE = re.compile(r"^[a-z0-9_-]+$")

MODIFIER_ORDER = ("control", "shift", "alt", "meta")
SCOPES = ("global", "window", "content")


@dataclass(frozen=True)
class ScopedEvent:
    """A validated event string split into its scope segments."""

    raw: str
    segments: tuple[str, ...]

    @classmethod
    def parse(cls, raw: str) -> "ScopedEvent":
        if raw == "":
            return cls(raw="", segments=())
        segments = raw.split(".")
        for seg in segments:
            if not _SEGMENT_RE.match(seg):
                raise ValidationError(
                    f'malformed event "{raw}": segment {seg!r} must match [a-z0-9_-]+'
                )
        return cls(raw=raw, segments=tuple(segments))


def expand_event(event: ScopedEvent | str) -> list[str]:
    """Return the ordered trigger sequence for an event.

    The first half is every prefix of the event by ascending length starting
    with ""; the second half is the first half reversed with ".finally"
    appended ("finally" for the empty prefix). Length is always 2n+2 for n
    segments.
    """
    if isinstance(event, str):
        event = ScopedEvent.parse(event)
    prefixes = [""]
    for seg in event.segments:
        prev = prefixes[-1]
        prefixes.append(seg if prev == "" else f"{prev}.{seg}")
    finals = [p + ".finally" if p else "finally" for p in reversed(prefixes)]
    return prefixes + finals


@dataclass(frozen=True)
class Subscription:
    """Handle returned by subscribe(); `seq` increases in registration order."""

    id: str
    pattern: ScopedEvent
    seq: int


@dataclass(frozen=True)
class DeliveryError:
    pattern: str
    subscription_id: str
    error: str


@dataclass
class DeliveryReport:
    """What one publish() actually did, in invocation order."""

    event: ScopedEvent
    invoked: list[tuple[str, str]] = field(default_factory=list)
    errors: list[DeliveryError] = field(default_factory=list)


class EventBus:
    """Synchronous scoped bus; all mutations serialize on an internal lock.

    Handlers run on the publisher's call path against a snapshot of the
    subscription table, so subscribing or unsubscribing from inside a handler
    only affects later publishes. A raising handler is recorded in the report
    and never blocks the remaining deliveries.
    """

    def __init__(self) -> None:
        self._lock = threading.RLock()
        self._seq = 0
        self._by_pattern: dict[str, list[tuple[Subscription, Callable[..., Any], bool]]] = {}
        self._by_id: dict[str, str] = {}

    def subscribe(
        self,
        pattern: str,
        handler: Callable[..., Any],
        *,
        with_event: bool = False,
    ) -> Subscription:
        """Register `handler` on an exact pattern string.

        With `with_event=True` the handler is called as
        ``handler(event_raw, payload)`` instead of ``handler(payload)`` —
        used by bridges subscribed on a namespace prefix that need the
        concrete published event.
        """
        parsed = ScopedEvent.parse(pattern)
        with self._lock:
            self._seq += 1
            sub = Subscription(id=f"sub-{self._seq}", pattern=parsed, seq=self._seq)
            self._by_pattern.setdefault(parsed.raw, []).append((sub, handler, with_event))
            self._by_id[sub.id] = parsed.raw
            return sub

    def unsubscribe(self, subscription_id: str) -> bool:
        """Remove a subscription; returns False for ids that no longer exist."""
        with self._lock:
            pattern = self._by_id.pop(subscription_id, None)
            if pattern is None:
                return False
            entries = self._by_pattern.get(pattern, [])
            self._by_pattern[pattern] = [e for e in entries if e[0].id != subscription_id]
            if not self._by_pattern[pattern]:
                del self._by_pattern[pattern]
            return True

    def publish(self, event: str, payload: Any = None) -> DeliveryReport:
        """Deliver `payload` to every subscription matched by the expansion.

        Matching subscriptions are invoked in expansion order, ties broken by
        registration order; each subscription is invoked at most once even if
        its pattern occurs twice in the expansion (possible when the event's
        own segments contain "finally").
        """
        parsed = ScopedEvent.parse(event)
        with self._lock:
            snapshot = [
                (pattern, entry)
                for pattern in expand_event(parsed)
                for entry in self._by_pattern.get(pattern, [])
            ]
        report = DeliveryReport(event=parsed)
        seen: set[str] = set()
        for pattern, (sub, handler, with_event) in snapshot:
            if sub.id in seen:
                continue
            seen.add(sub.id)
            report.invoked.append((pattern, sub.id))
            try:
                if with_event:
                    handler(parsed.raw, payload)
                else:
                    handler(payload)
            except Exception as exc:  # one failing subscriber never blocks others
                report.errors.append(DeliveryError(pattern, sub.id, repr(exc)))
        return report


@dataclass(frozen=True)
class KeyChord:
    """A logical key plus modifiers, scoped to where the shortcut applies."""

    modifiers: frozenset[str] = frozenset()
    key: str = ""
    scope: str = "window"

    def __post_init__(self) -> None:
        unknown = self.modifiers - set(MODIFIER_ORDER)
        if unknown:
            raise ValidationError(f"unknown modifiers: {sorted(unknown)}")
        if self.scope not in SCOPES:
            raise ValidationError(f'chord scope must be one of {SCOPES}, got "{self.scope}"')


def encode_key_chord(chord: KeyChord) -> str:
    """Encode a chord as "<scope>.keydown.<modifiers...>.<key>".

    Modifiers appear in the fixed order control, shift, alt, meta; the key is
    lowercased. Pressing A alone encodes to "window.keydown.a"; Ctrl+Shift+B
    encodes to "window.keydown.control.shift.b".
    """
    if not chord.key:
        raise ValidationError("chord key must be non-empty")
    key = chord.key.lower()
    if not _SEGMENT_RE.match(key):
        raise ValidationError(f"chord key {chord.key!r} must match [a-z0-9_-]+")
    parts = [chord.scope, "keydown"]
    parts.extend(m for m in MODIFIER_ORDER if m in chord.modifiers)
    parts.append(key)
    return ".".join(parts)


_MODIFIER_ALIASES = {
    "control": "control",
    "ctrl": "control",
    "shift": "shift",
    "alt": "alt",
    "option": "alt",
    "meta": "meta",
    "cmd": "meta",
    "command": "meta",
    "super": "meta",
    "win": "meta",
}


def parse_key_chord(text: str, *, scope: str = "window") -> KeyChord:
    """Parse a "control+shift+b"-style combination string.

    The last "+"-separated token is the key; every earlier token must be a
    modifier (aliases like ctrl/cmd/option are accepted). Case-insensitive.
    """
    tokens = [t.strip().lower() for t in text.split("+")]
    if not tokens or any(not t for t in tokens):
        raise ValidationError(f"malformed key combination {text!r}")
    *mods, key = tokens
    modifiers = set()
    for tok in mods:
        canonical = _MODIFIER_ALIASES.get(tok)
        if canonical is None:
            raise ValidationError(f"unknown modifier {tok!r} in key combination {text!r}")
        modifiers.add(canonical)
    return KeyChord(modifiers=frozenset(modifiers), key=key, scope=scope)
