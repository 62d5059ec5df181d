from pathlib import Path

from click.testing import CliRunner

from agentforge.cli import main
from agentforge.service import builtin_templates_dir


def invoke(*args, **kwargs):
    return CliRunner().invoke(main, list(args), **kwargs)


def test_validate_ok_template():
    template = builtin_templates_dir() / "rewriter.agent.xml"
    result = invoke("validate", str(template))
    assert result.exit_code == 0
    assert "OK (Rewriter)" in result.output


def test_validate_reports_diagnostics(tmp_path):
    bad = tmp_path / "bad.agent.xml"
    bad.write_text('<agent name="x"><system>S</system></agent>')
    result = invoke("validate", str(bad))
    assert result.exit_code == 1
    assert f"{bad}:" in result.output
    assert ": error: " in result.output
    assert "system" in result.output


def test_validate_parse_error_has_location(tmp_path):
    bad = tmp_path / "broken.agent.xml"
    bad.write_text("<agent><prompt></agent>")
    result = invoke("validate", str(bad))
    assert result.exit_code == 1
    assert f"{bad}:1:" in result.output


def test_run_with_stdin_mock_provider():
    result = invoke(
        "run", "--agent", "Rewriter", "--input", "-", "--provider", "mock",
        input="hello world",
    )
    assert result.exit_code == 0, result.output
    assert result.output.strip() == "MOCK[Rewriter]: hello world"


def test_run_with_input_file(tmp_path):
    source = tmp_path / "in.txt"
    source.write_text("from a file")
    result = invoke("run", "--agent", "Checker", "--input", str(source))
    assert result.exit_code == 0, result.output
    assert result.output.strip() == "MOCK[Checker]: from a file"


def test_run_unknown_agent_fails_cleanly():
    result = invoke("run", "--agent", "Nope", "--input", "-", input="x")
    assert result.exit_code != 0
    assert "unknown agent" in result.output


def test_run_custom_templates_dir(tmp_path):
    (tmp_path / "echo.agent.xml").write_text(
        '<agent name="Echo"><prompt><system>s</system><user><input/></user></prompt></agent>'
    )
    result = invoke(
        "run", "--agent", "Echo", "--input", "-", "--templates", str(tmp_path),
        input="ping",
    )
    assert result.exit_code == 0, result.output
    assert result.output.strip() == "MOCK[Echo]: ping"


def test_run_with_document_comments_sidecar(tmp_path):
    (tmp_path / "agents").mkdir()
    (tmp_path / "agents" / "annotator.agent.xml").write_text(
        '<agent name="Annotator">'
        "<prompt><system>s</system><user><input/></user></prompt>"
        "<post-action><insert-comment><output/></insert-comment></post-action>"
        "</agent>"
    )
    doc = tmp_path / "draft.tex"
    doc.write_text("One sentence here. Another one there.")
    result = invoke(
        "run", "--agent", "Annotator", "--input", "-",
        "--templates", str(tmp_path / "agents"),
        "--doc", str(doc), "--cursor", "3", "--save-comments",
        input="note this",
    )
    assert result.exit_code == 0, result.output
    sidecar = Path(str(doc) + ".comments.json")
    assert sidecar.exists()
    assert "MOCK[Annotator]: note this" in sidecar.read_text()


def test_diff_command(tmp_path):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    a.write_text("the cat sat")
    b.write_text("the dog sat")
    result = invoke("diff", "--unit", "word", "--format", "html", str(a), str(b))
    assert result.exit_code == 0
    assert result.output.strip() == "the <del>cat</del> <ins>dog</ins> sat"


def test_diff_command_latex(tmp_path):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    a.write_text("x")
    b.write_text("y")
    result = invoke("diff", "--format", "latex", str(a), str(b))
    assert result.output.strip() == "\\deleted{x} \\added{y}"


def test_repl_runs_lines():
    result = invoke("repl", "--agent", "Adviser", input="first\nsecond\n")
    assert result.exit_code == 0
    assert "MOCK[Adviser]: first" in result.output
    assert "MOCK[Adviser]: second" in result.output


def test_keygen(tmp_path):
    result = invoke("keygen", "--out-dir", str(tmp_path))
    assert result.exit_code == 0
    assert (tmp_path / "agentforge_signing_key.pem").exists()
    assert (tmp_path / "agentforge_public_key.pem").exists()


def test_help_lists_subcommands():
    result = invoke("--help")
    for command in ("validate", "run", "repl", "serve", "diff", "keygen"):
        assert command in result.output
