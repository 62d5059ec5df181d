"""Command line front door: validate, run, repl, serve, diff, keygen."""

from __future__ import annotations

import shutil
import subprocess
import sys
from pathlib import Path

import click

from . import __version__
from .compiler import load_agent_template
from .diffing import eval_diff, eval_join_diff
from .directives import builtin_registry
from .document import Document, load_document, save_document
from .engine import AgentEngine
from .errors import AgentForgeError
from .licensing import generate_keypair
from .runtime import provider_from_name
from .service import DEFAULT_HOST, DEFAULT_PORT, ServiceConfig, builtin_templates_dir, create_app


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Compile and run XML-templated writing agents."""


@main.command()
@click.argument("files", nargs=-1, required=True, type=click.Path(exists=True, path_type=Path))
def validate(files: tuple[Path, ...]) -> None:
    """Parse, validate, and compile template files; print diagnostics."""
    failed = False
    registry = builtin_registry()
    for file in files:
        definition, _, diagnostics = load_agent_template(
            file.read_text(encoding="utf-8"), registry, filename=str(file)
        )
        for line in diagnostics:
            click.echo(line)
        if definition is None:
            failed = True
        elif not diagnostics:
            click.echo(f"{file}: OK ({definition.name})")
    sys.exit(1 if failed else 0)


def _build_engine(templates: Path | None, provider_name: str) -> AgentEngine:
    config = ServiceConfig.from_env()
    provider = provider_from_name(
        provider_name,
        base_url=config.openai_base_url,
        api_key=config.openai_api_key,
    )
    engine = AgentEngine(provider=provider, default_model_id=config.default_model)
    engine.load_directory(templates or config.templates_dir or builtin_templates_dir())
    return engine


def _copy_to_os_clipboard(text: str) -> bool:
    for command in (["pbcopy"], ["xclip", "-selection", "clipboard"], ["clip.exe"]):
        if shutil.which(command[0]):
            try:
                subprocess.run(command, input=text.encode("utf-8"), check=True)
                return True
            except (OSError, subprocess.CalledProcessError):
                return False
    return False


@main.command()
@click.option("--agent", "agent_name", required=True, help="Agent name to run.")
@click.option(
    "--input", "input_source", required=True,
    help="Input file path, or - to read stdin.",
)
@click.option("--provider", "provider_name", default="mock", type=click.Choice(["mock", "openai"]))
@click.option("--templates", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--doc", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Attach a .tex document for select/completion/insert-comment.")
@click.option("--cursor", type=int, default=0, show_default=True)
@click.option("--save-comments", is_flag=True,
              help="Persist document comments to a sidecar JSON (opt-in).")
@click.option("--os-clipboard", is_flag=True, help="Also copy the clipboard buffer to the OS.")
def run(agent_name, input_source, provider_name, templates, doc, cursor, save_comments, os_clipboard):
    """Run one agent over one input and print the output."""
    engine = _build_engine(templates, provider_name)
    if input_source == "-":
        input_text = sys.stdin.read()
    else:
        input_text = Path(input_source).read_text(encoding="utf-8")
    try:
        session = engine.create_session(
            agent_name,
            document=load_document(doc, cursor=cursor) if doc else Document(""),
        )
        output, session_id = engine.run(agent_name, input_text, session.session_id)
    except AgentForgeError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(output)
    for message in engine.frontend_buffer.drain():
        click.echo(f"[message] {message}", err=True)
    if doc and save_comments:
        save_document(engine.document_for(session_id), doc, with_comments=True)
    if os_clipboard:
        clipboard = engine.get_session(session_id).clipboard_buffer
        if clipboard and not _copy_to_os_clipboard(clipboard):
            click.echo("note: no OS clipboard helper found", err=True)


@main.command()
@click.option("--agent", "agent_name", required=True)
@click.option("--provider", "provider_name", default="mock", type=click.Choice(["mock", "openai"]))
@click.option("--templates", type=click.Path(exists=True, file_okay=False, path_type=Path))
def repl(agent_name, provider_name, templates):
    """Interactive loop: each line runs the agent in one shared session."""
    engine = _build_engine(templates, provider_name)
    try:
        session = engine.create_session(agent_name)
    except AgentForgeError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"{agent_name} ready (ctrl-d to exit)")
    while True:
        try:
            line = click.prompt(">", prompt_suffix=" ")
        except (EOFError, click.Abort):
            click.echo()
            return
        if not line.strip():
            continue
        try:
            output, _ = engine.run(agent_name, line, session.session_id)
        except AgentForgeError as exc:
            click.echo(f"error: {exc}", err=True)
            continue
        click.echo(output)
        for message in engine.frontend_buffer.drain():
            click.echo(f"[message] {message}", err=True)


@main.command()
@click.option("--host", default=DEFAULT_HOST, show_default=True)
@click.option("--port", default=DEFAULT_PORT, show_default=True, type=int)
@click.option("--templates", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--provider", "provider_name", default=None, type=click.Choice(["mock", "openai"]))
def serve(host, port, templates, provider_name):
    """Start the local HTTP service (and the /ui workspace when built)."""
    import uvicorn

    config = ServiceConfig.from_env()
    if templates is not None:
        config.templates_dir = templates
    if provider_name is not None:
        config.provider = provider_name
    app = create_app(config)
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.command(name="diff")
@click.option("--unit", default="word", type=click.Choice(["line", "word", "letter"]),
              show_default=True)
@click.option("--format", "fmt", default="html", type=click.Choice(["html", "markdown", "latex"]),
              show_default=True)
@click.argument("a", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("b", type=click.Path(exists=True, dir_okay=False, path_type=Path))
def diff_command(unit, fmt, a, b):
    """Diff two files and print the formatted result."""
    hunks = eval_diff(a.read_text(encoding="utf-8"), b.read_text(encoding="utf-8"), unit)
    click.echo(eval_join_diff(hunks, fmt))


@main.command()
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path), default=Path("."),
              show_default=True)
def keygen(out_dir):
    """Write a fresh Ed25519 keypair for trial signing / license validation."""
    out_dir.mkdir(parents=True, exist_ok=True)
    private_pem, public_pem = generate_keypair()
    private_path = out_dir / "agentforge_signing_key.pem"
    public_path = out_dir / "agentforge_public_key.pem"
    private_path.write_bytes(private_pem)
    public_path.write_bytes(public_pem)
    click.echo(f"wrote {private_path} and {public_path}")


if __name__ == "__main__":
    main()
