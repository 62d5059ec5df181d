import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agentforge.diffing import DiffHunk, eval_diff, eval_join_diff, tokenize, unit_separator
from agentforge.errors import ValidationError


def lcs_brute(a, b):
    """LCS length by subsequence enumeration — independent of the DP path.

    Enumerates every subsequence of the shorter sequence and checks it
    against the longer one. Exponential, fine for len <= 12.
    """
    if len(a) > len(b):
        a, b = b, a
    best = 0
    for mask in range(1 << len(a)):
        size = mask.bit_count()
        if size <= best:
            continue
        candidate = [a[i] for i in range(len(a)) if mask >> i & 1]
        it = iter(b)
        if all(token in it for token in candidate):
            best = size
    return best


def hunk_tokens(hunks, ops):
    return [t for h in hunks if h.op in ops for t in h.tokens]


def test_identical_inputs_single_equal_hunk():
    assert eval_diff("abc", "abc", "word") == [DiffHunk("equal", ("abc",), "word")]


def test_word_replacement_example():
    # Expected hunks verified against the brute-force LCS oracle:
    # LCS("the cat sat", "the dog sat") = ["the", "sat"], edit size 2.
    assert lcs_brute("the cat sat".split(), "the dog sat".split()) == 2
    assert eval_diff("the cat sat", "the dog sat", "word") == [
        DiffHunk("equal", ("the",), "word"),
        DiffHunk("delete", ("cat",), "word"),
        DiffHunk("insert", ("dog",), "word"),
        DiffHunk("equal", ("sat",), "word"),
    ]


def test_empty_source_letter():
    assert eval_diff("", "x", "letter") == [DiffHunk("insert", ("x",), "letter")]


def test_both_empty():
    assert eval_diff("", "", "word") == []


def test_invalid_unit():
    with pytest.raises(ValidationError):
        eval_diff("a", "b", "sentence")
    with pytest.raises(ValidationError):
        tokenize("a", "char")
    with pytest.raises(ValidationError):
        unit_separator("char")


def test_delete_before_insert_at_equal_cost():
    hunks = eval_diff("cat", "dog", "word")
    assert [h.op for h in hunks] == ["delete", "insert"]


def test_line_unit_keeps_empty_lines():
    hunks = eval_diff("a\n\nb", "a\nb", "line")
    assert hunk_tokens(hunks, ("equal", "delete")) == ["a", "", "b"]
    assert hunk_tokens(hunks, ("equal", "insert")) == ["a", "b"]


def _random_case(rng, unit):
    vocab = ["a", "b", "c", "d", "e"]
    n, m = rng.randint(0, 12), rng.randint(0, 12)
    a = [rng.choice(vocab) for _ in range(n)]
    b = [rng.choice(vocab) for _ in range(m)]
    sep = unit_separator(unit)
    return sep.join(a), sep.join(b), a, b


@pytest.mark.parametrize("unit", ["line", "word", "letter"])
def test_diff_reconstruction_and_minimality(unit):
    rng = random.Random(42)
    for _ in range(150):
        source, target, a, b = _random_case(rng, unit)
        hunks = eval_diff(source, target, unit)
        assert hunk_tokens(hunks, ("equal", "delete")) == a
        assert hunk_tokens(hunks, ("equal", "insert")) == b
        edit_size = len(hunk_tokens(hunks, ("insert",))) + len(hunk_tokens(hunks, ("delete",)))
        assert edit_size == len(a) + len(b) - 2 * lcs_brute(a, b)
        # Maximal runs: adjacent hunks never share an op; no empty hunks.
        for left, right in zip(hunks, hunks[1:]):
            assert left.op != right.op
        assert all(h.tokens for h in hunks)


def test_join_diff_html_example():
    hunks = eval_diff("the cat sat", "the dog sat", "word")
    assert eval_join_diff(hunks, "html") == "the <del>cat</del> <ins>dog</ins> sat"


def test_join_diff_latex_example():
    hunks = eval_diff("the cat sat", "the dog sat", "word")
    assert eval_join_diff(hunks, "latex") == "the \\deleted{cat} \\added{dog} sat"


def test_join_diff_markdown():
    hunks = eval_diff("the cat sat", "the dog sat", "word")
    assert eval_join_diff(hunks, "markdown") == "the ~~cat~~ **dog** sat"


def test_join_diff_empty():
    assert eval_join_diff([], "html") == ""


def test_join_diff_invalid_format():
    with pytest.raises(ValidationError):
        eval_join_diff([], "rst")


def test_join_diff_letter_unit_concatenates():
    hunks = eval_diff("cat", "cut", "letter")
    assert eval_join_diff(hunks, "html") == "c<del>a</del><ins>u</ins>t"


text_st = st.text(alphabet="ab \n", max_size=30)


@settings(max_examples=150, deadline=None)
@given(text_st, st.sampled_from(["line", "word", "letter"]), st.sampled_from(["html", "markdown", "latex"]))
def test_identity_diff_renders_plainly(text, unit, fmt):
    # diff(s, s) rendered in any format equals s re-joined by the unit.
    rejoined = unit_separator(unit).join(tokenize(text, unit))
    assert eval_join_diff(eval_diff(text, text, unit), fmt) == rejoined


@settings(max_examples=150, deadline=None)
@given(text_st, text_st, st.sampled_from(["line", "word", "letter"]))
def test_reconstruction_any_text(source, target, unit):
    hunks = eval_diff(source, target, unit)
    assert hunk_tokens(hunks, ("equal", "delete")) == tokenize(source, unit)
    assert hunk_tokens(hunks, ("equal", "insert")) == tokenize(target, unit)
