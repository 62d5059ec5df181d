"""XML agent templates parsed into directive trees.

Every element becomes a DirectiveNode: element name -> directive name,
attributes -> parameters, children and character data -> ordered body.
Whitespace handling follows how the templates are written in practice:
indentation-only text between elements is dropped, each element's text block
is trimmed at its outer boundaries, and interior newlines survive verbatim so
multi-line prompt bodies come through untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from xml.parsers import expat
from xml.sax.saxutils import escape, quoteattr

from .errors import TemplateParseError


@dataclass(frozen=True)
class TextSpan:
    text: str
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass
class DirectiveNode:
    """One parsed XML element; equality ignores source locations."""

    name: str
    params: dict[str, str] = field(default_factory=dict)
    body: list["DirectiveNode | TextSpan"] = field(default_factory=list)
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    def children(self) -> list["DirectiveNode"]:
        return [item for item in self.body if isinstance(item, DirectiveNode)]

    def find_all(self, name: str) -> list["DirectiveNode"]:
        return [child for child in self.children() if child.name == name]

    def first(self, name: str) -> "DirectiveNode | None":
        matches = self.find_all(name)
        return matches[0] if matches else None

    def text_content(self) -> str:
        """Concatenated text spans of this node's own body."""
        return "".join(item.text for item in self.body if isinstance(item, TextSpan))


def parse_template(text: str, *, filename: str = "<template>") -> DirectiveNode:
    """Parse one XML document into its root DirectiveNode.

    Raises TemplateParseError with line/column for syntax errors, including
    multiple root elements (expat reports junk after the document element).
    """
    builder = _TreeBuilder(filename)
    parser = expat.ParserCreate()
    parser.ordered_attributes = True
    parser.StartElementHandler = builder.start
    parser.EndElementHandler = builder.end
    parser.CharacterDataHandler = builder.cdata
    builder.parser = parser
    try:
        parser.Parse(text, True)
    except expat.ExpatError as exc:
        raise TemplateParseError(
            expat.errors.messages[exc.code],
            line=exc.lineno,
            col=exc.offset + 1,
            filename=filename,
        ) from None
    if builder.root is None:
        raise TemplateParseError("no element found", line=1, col=1, filename=filename)
    return builder.root


class _TreeBuilder:
    def __init__(self, filename: str):
        self.filename = filename
        self.parser: expat.XMLParserType | None = None
        self.root: DirectiveNode | None = None
        self.stack: list[DirectiveNode] = []
        self.pending_text: list[str] = []
        self.pending_pos: tuple[int, int] | None = None

    def _pos(self) -> tuple[int, int]:
        assert self.parser is not None
        return self.parser.CurrentLineNumber, self.parser.CurrentColumnNumber + 1

    def _flush_text(self) -> None:
        if not self.pending_text:
            return
        text = "".join(self.pending_text)
        line, col = self.pending_pos or (0, 0)
        self.pending_text.clear()
        self.pending_pos = None
        self.stack[-1].body.append(TextSpan(text, line, col))

    def start(self, name: str, attrs: list[str]) -> None:
        line, col = self._pos()
        params = {attrs[i]: attrs[i + 1] for i in range(0, len(attrs), 2)}
        node = DirectiveNode(name=name, params=params, line=line, col=col)
        if self.stack:
            self._flush_text()
            self.stack[-1].body.append(node)
        self.stack.append(node)

    def end(self, name: str) -> None:
        self._flush_text()
        node = self.stack.pop()
        node.body = _finalize_body(node.body)
        if not self.stack:
            self.root = node

    def cdata(self, data: str) -> None:
        if not self.stack:
            return
        if not self.pending_text:
            self.pending_pos = self._pos()
        self.pending_text.append(data)


def _finalize_body(body: list) -> list:
    # Formatting whitespace always carries a newline; deliberate spaces
    # (e.g. the trailing space in "<text>hello </text>") never do, and
    # survive even at block boundaries.
    items = [
        item
        for item in body
        if not (isinstance(item, TextSpan) and not item.text.strip() and "\n" in item.text)
    ]
    if items and isinstance(items[0], TextSpan):
        text = items[0].text
        leading = text[: len(text) - len(text.lstrip())]
        if "\n" in leading:
            items[0] = replace(items[0], text=text.lstrip())
            if not items[0].text:
                items.pop(0)
    if items and isinstance(items[-1], TextSpan):
        text = items[-1].text
        trailing = text[len(text.rstrip()):]
        if "\n" in trailing:
            items[-1] = replace(items[-1], text=text.rstrip())
            if not items[-1].text:
                items.pop()
    return items


def serialize(node: DirectiveNode) -> str:
    """Render a tree back to XML; reparsing yields a structurally equal tree."""
    attrs = "".join(f" {key}={quoteattr(value)}" for key, value in node.params.items())
    if not node.body:
        return f"<{node.name}{attrs} />"
    inner = "".join(
        serialize(item) if isinstance(item, DirectiveNode) else escape(item.text)
        for item in node.body
    )
    return f"<{node.name}{attrs}>{inner}</{node.name}>"
