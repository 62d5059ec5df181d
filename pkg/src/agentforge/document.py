"""Headless stand-in for the Overleaf editor: a LaTeX-aware document model.

Documents are immutable values holding text, an explicit cursor, and a side
list of review comments. Segmentation is pure: words are whitespace-delimited
runs, sentences end at [.!?] before whitespace (with a small abbreviation
whitelist so "e.g." and "Fig. 1" survive), paragraphs split on blank lines
and on \\section/\\subsection heading lines, and sections run from one
heading to the next.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import SelectionRangeError, ValidationError

UNITS = ("word", "sentence", "paragraph", "section")

# Words whose trailing period never ends a sentence. "al." covers "et al.".
ABBREVIATIONS = {
    "e.g.", "i.e.", "etc.", "cf.", "vs.", "al.", "fig.", "figs.", "eq.",
    "eqs.", "sec.", "tab.", "no.", "resp.",
}

_SENTENCE_END_RE = re.compile(r"[.!?]+(?=\s|$)")
_HEADING_RE = re.compile(r"^\s*\\(?:sub)?section\b")


@dataclass(frozen=True)
class Comment:
    start: int
    end: int
    body: str
    author: str


@dataclass(frozen=True)
class Segment:
    """A half-open [start, end) span of one segmentation unit."""

    unit: str
    start: int
    end: int
    index: int


@dataclass(frozen=True)
class Document:
    text: str
    cursor: int = 0
    comments: tuple[Comment, ...] = ()

    def __post_init__(self) -> None:
        if not 0 <= self.cursor <= len(self.text):
            raise ValidationError(
                f"cursor {self.cursor} outside document of length {len(self.text)}"
            )
        for comment in self.comments:
            if not 0 <= comment.start <= comment.end <= len(self.text):
                raise ValidationError(
                    f"comment range [{comment.start}, {comment.end}) outside document"
                )

    def with_cursor(self, cursor: int) -> "Document":
        return replace(self, cursor=cursor)

    def segment_text(self, seg: Segment) -> str:
        return self.text[seg.start : seg.end]


def segment(doc: Document, unit: str) -> list[Segment]:
    """Return the ordered, non-overlapping segments of one unit."""
    if unit not in UNITS:
        raise ValidationError(f'segmentation unit must be one of {UNITS}, got "{unit}"')
    if unit == "word":
        spans = [m.span() for m in re.finditer(r"\S+", doc.text)]
    elif unit == "paragraph":
        spans = _paragraph_spans(doc.text)
    elif unit == "section":
        spans = _section_spans(doc.text)
    else:
        spans = []
        for start, end in _paragraph_spans(doc.text):
            spans.extend(_sentence_spans(doc.text, start, end))
    return [Segment(unit, s, e, i) for i, (s, e) in enumerate(spans)]


def _line_spans(text: str) -> list[tuple[int, int]]:
    spans = []
    pos = 0
    for line in text.split("\n"):
        spans.append((pos, pos + len(line)))
        pos += len(line) + 1
    return spans


def _paragraph_spans(text: str) -> list[tuple[int, int]]:
    spans: list[tuple[int, int]] = []
    block: list[tuple[int, int]] = []

    def flush() -> None:
        if block:
            spans.append((block[0][0], block[-1][1]))
            block.clear()

    for start, end in _line_spans(text):
        line = text[start:end]
        if not line.strip():
            flush()
        elif _HEADING_RE.match(line):
            flush()
            spans.append((start, end))
        else:
            block.append((start, end))
    flush()
    return spans


def _section_spans(text: str) -> list[tuple[int, int]]:
    heads = [s for s, e in _line_spans(text) if _HEADING_RE.match(text[s:e])]
    if not heads:
        if not text.strip():
            return []
        return [(_lstrip_start(text, 0), _rstrip_end(text, 0, len(text)))]
    spans = []
    if text[: heads[0]].strip():
        spans.append((_lstrip_start(text, 0), _rstrip_end(text, 0, heads[0])))
    for i, start in enumerate(heads):
        stop = heads[i + 1] if i + 1 < len(heads) else len(text)
        spans.append((start, _rstrip_end(text, start, stop)))
    return spans


def _lstrip_start(text: str, start: int) -> int:
    while start < len(text) and text[start].isspace():
        start += 1
    return start


def _rstrip_end(text: str, start: int, end: int) -> int:
    while end > start and text[end - 1].isspace():
        end -= 1
    return end


def _sentence_spans(text: str, start: int, end: int) -> list[tuple[int, int]]:
    spans = []
    pos = _lstrip_start(text, start)
    for match in _SENTENCE_END_RE.finditer(text, pos, end):
        stop = match.end()
        word_start = stop
        while word_start > start and not text[word_start - 1].isspace():
            word_start -= 1
        if text[word_start:stop].lower() in ABBREVIATIONS:
            continue
        if stop > pos:
            spans.append((pos, stop))
        pos = _lstrip_start(text, stop)
    tail_end = _rstrip_end(text, pos, end)
    if tail_end > pos:
        spans.append((pos, tail_end))
    return spans


def _locate(segments: list[Segment], cursor: int) -> int:
    """Index of the segment containing the cursor, else the nearest one before it."""
    for seg in segments:
        if seg.start <= cursor < seg.end:
            return seg.index
    before = [seg for seg in segments if seg.start <= cursor]
    return before[-1].index if before else 0


def select_contextual(doc: Document, unit: str = "sentence", offset: int = 0) -> str:
    """Text of the unit at (segment containing cursor) + offset.

    Offset 0 is the current unit; negative offsets move backwards. An offset
    that leaves the document raises SelectionRangeError.
    """
    segments = segment(doc, unit)
    if not segments:
        raise ValidationError("document is empty")
    index = _locate(segments, doc.cursor) + offset
    if not 0 <= index < len(segments):
        raise SelectionRangeError(unit, index, len(segments))
    return doc.segment_text(segments[index])


def insert_comment(doc: Document, start: int, end: int, body: str, author: str) -> Document:
    """Append a review comment; the document text is never touched."""
    if not body:
        raise ValidationError("comment body must be non-empty")
    if not 0 <= start <= end <= len(doc.text):
        raise ValidationError(
            f"comment range [{start}, {end}) outside document of length {len(doc.text)}"
        )
    return replace(doc, comments=doc.comments + (Comment(start, end, body, author),))


def completion_context(doc: Document, max_chars: int) -> str:
    """Up to max_chars of text ending at the cursor, for continuation prompts.

    The window is trimmed forward to the first sentence start inside it, else
    the first word start, else returned raw.
    """
    if max_chars < 1:
        raise ValidationError(f"max_chars must be >= 1, got {max_chars}")
    cursor = doc.cursor
    window_start = max(0, cursor - max_chars)
    if window_start == 0:
        return doc.text[:cursor]
    for unit in ("sentence", "word"):
        starts = [s.start for s in segment(doc, unit) if window_start <= s.start < cursor]
        if starts:
            return doc.text[starts[0] : cursor]
    return doc.text[window_start:cursor]


def load_document(path: str | Path, *, cursor: int = 0, with_comments: bool = False) -> Document:
    """Read a UTF-8 .tex file; optionally restore the comment sidecar."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    comments: tuple[Comment, ...] = ()
    sidecar = _sidecar_path(path)
    if with_comments and sidecar.exists():
        entries = json.loads(sidecar.read_text(encoding="utf-8"))
        comments = tuple(
            Comment(e["range"][0], e["range"][1], e["body"], e["author"]) for e in entries
        )
    return Document(text=text, cursor=cursor, comments=comments)


def save_document(doc: Document, path: str | Path, *, with_comments: bool = False) -> None:
    """Write the text back; comments persist only when explicitly requested."""
    path = Path(path)
    path.write_text(doc.text, encoding="utf-8")
    if with_comments:
        entries = [
            {"range": [c.start, c.end], "body": c.body, "author": c.author}
            for c in doc.comments
        ]
        _sidecar_path(path).write_text(json.dumps(entries, indent=2), encoding="utf-8")


def _sidecar_path(path: Path) -> Path:
    return path.with_name(path.name + ".comments.json")
