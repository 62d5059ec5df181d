"""Minimal edit scripts between two texts at line, word, or letter granularity.

The script is LCS-minimal: the number of inserted plus deleted tokens equals
len(source) + len(target) - 2 * LCS. At equal cost, deletions are emitted
before insertions. Hunks are maximal runs — two adjacent hunks never share
an op.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ValidationError

UNITS = ("line", "word", "letter")
FORMATS = ("html", "markdown", "latex")

_WORD_RE = re.compile(r"\S+")

# (insert_open, insert_close, delete_open, delete_close)
_MARKUP = {
    "html": ("<ins>", "</ins>", "<del>", "</del>"),
    "markdown": ("**", "**", "~~", "~~"),
    "latex": ("\\added{", "}", "\\deleted{", "}"),
}


@dataclass(frozen=True)
class DiffHunk:
    """One maximal run of equal/insert/delete tokens."""

    op: str
    tokens: tuple[str, ...]
    unit: str


def tokenize(text: str, unit: str) -> list[str]:
    """Split text into diff tokens. Empty text yields no tokens."""
    if unit == "line":
        return text.split("\n") if text else []
    if unit == "word":
        return _WORD_RE.findall(text)
    if unit == "letter":
        return list(text)
    raise ValidationError(f'diff unit must be one of {UNITS}, got "{unit}"')


def unit_separator(unit: str) -> str:
    """The joiner used when rendering tokens of a unit back to text."""
    if unit == "line":
        return "\n"
    if unit == "word":
        return " "
    if unit == "letter":
        return ""
    raise ValidationError(f'diff unit must be one of {UNITS}, got "{unit}"')


def eval_diff(source: str, target: str, unit: str = "word") -> list[DiffHunk]:
    """Compute the minimal edit script from source to target.

    Keeping the equal+delete hunks reconstructs the source token sequence;
    equal+insert reconstructs the target.
    """
    if unit not in UNITS:
        raise ValidationError(f'diff unit must be one of {UNITS}, got "{unit}"')
    a = tokenize(source, unit)
    b = tokenize(target, unit)
    ops = _edit_script(a, b)
    hunks: list[DiffHunk] = []
    for op, token in ops:
        if hunks and hunks[-1].op == op:
            hunks[-1] = DiffHunk(op, hunks[-1].tokens + (token,), unit)
        else:
            hunks.append(DiffHunk(op, (token,), unit))
    return hunks


def _edit_script(a: list[str], b: list[str]) -> list[tuple[str, str]]:
    n, m = len(a), len(b)
    # lcs[i][j] = LCS length of a[:i], b[:j]
    lcs = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        row, prev = lcs[i], lcs[i - 1]
        ai = a[i - 1]
        for j in range(1, m + 1):
            if ai == b[j - 1]:
                row[j] = prev[j - 1] + 1
            else:
                pj, rj = prev[j], row[j - 1]
                row[j] = pj if pj >= rj else rj
    # Walk back from (n, m); preferring insert on ties here puts deletes
    # before inserts once the script is reversed.
    out: list[tuple[str, str]] = []
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and a[i - 1] == b[j - 1]:
            out.append(("equal", a[i - 1]))
            i -= 1
            j -= 1
        elif j > 0 and (i == 0 or lcs[i][j - 1] >= lcs[i - 1][j]):
            out.append(("insert", b[j - 1]))
            j -= 1
        else:
            out.append(("delete", a[i - 1]))
            i -= 1
    out.reverse()
    return out


def eval_join_diff(hunks: list[DiffHunk], format: str = "html") -> str:
    """Render hunks as text with inserts and deletes marked up.

    html wraps runs in <ins>/<del>, markdown in **/~~, latex in
    \\added{}/\\deleted{} (the macros are assumed to be user-provided; no
    preamble is emitted). Word and line units re-join with a single space
    and newline respectively.
    """
    if format not in FORMATS:
        raise ValidationError(f'join-diff format must be one of {FORMATS}, got "{format}"')
    if not hunks:
        return ""
    ins_open, ins_close, del_open, del_close = _MARKUP[format]
    sep = unit_separator(hunks[0].unit)
    parts = []
    for hunk in hunks:
        text = sep.join(hunk.tokens)
        if hunk.op == "insert":
            parts.append(f"{ins_open}{text}{ins_close}")
        elif hunk.op == "delete":
            parts.append(f"{del_open}{text}{del_close}")
        else:
            parts.append(text)
    return sep.join(parts)
