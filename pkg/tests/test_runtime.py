import json
import threading

import httpx
import pytest

from agentforge.bus import EventBus
from agentforge.compiler import compile_agent
from agentforge.directives import builtin_registry
from agentforge.engine import run_agent
from agentforge.errors import (
    AuthError,
    BusyError,
    NetworkError,
    ProviderError,
    TokenLimitError,
    ValidationError,
)
from agentforge.parser import parse_template
from agentforge.runtime import (
    ChatMessage,
    MockProvider,
    ModelConfig,
    OpenAIProvider,
    PromptBundle,
    call_model,
    clear_session,
    create_session,
)
from agentforge.service import builtin_templates_dir

REGISTRY = builtin_registry()


def agent_from(name):
    text = (builtin_templates_dir() / f"{name}.agent.xml").read_text()
    return compile_agent(parse_template(text), REGISTRY)


def simple_agent(xml=None):
    xml = xml or (
        '<agent name="T"><prompt><system>s</system><user><input/></user></prompt></agent>'
    )
    return compile_agent(parse_template(xml), REGISTRY)


class FailingProvider(MockProvider):
    def complete(self, request):
        raise ProviderError("backend down")


def test_model_config_validation():
    with pytest.raises(ValidationError):
        ModelConfig(temperature=2.5)
    with pytest.raises(ValidationError):
        ModelConfig(max_tokens=0)
    cfg = ModelConfig()
    assert (cfg.model_id, cfg.temperature, cfg.max_tokens) == ("gpt-3.5-turbo", 0.7, 2000)


def test_chat_message_validation():
    with pytest.raises(ValidationError):
        ChatMessage("user", "")
    with pytest.raises(ValidationError):
        ChatMessage("oracle", "x")
    ChatMessage("system", "")  # empty system content allowed


def test_create_session_fresh_state():
    session = create_session(simple_agent())
    assert session.phase == "idle"
    assert session.input_buffer == session.output_buffer == session.clipboard_buffer == ""
    assert session.memory == {}
    assert session.chat_history == []


def test_clear_preserves_memory():
    session = create_session(simple_agent())
    session.memory["k"] = "v"
    session.output_buffer = "stale"
    session.chat_history.append(ChatMessage("user", "x"))
    clear_session(session)
    assert session.memory == {"k": "v"}
    assert session.output_buffer == ""
    assert session.chat_history == []
    clear_session(session)  # idempotent
    assert session.memory == {"k": "v"}


def test_call_model_mock_contract():
    bundle = PromptBundle(system="s", user="hello", model=ModelConfig())
    assert call_model(ModelConfig(), bundle, MockProvider(), agent_name="A") == "MOCK[A]: hello"


def test_call_model_rejects_empty_user():
    bundle = PromptBundle(system="s", user="", model=ModelConfig())
    with pytest.raises(ValidationError):
        call_model(ModelConfig(), bundle, MockProvider())


def test_run_agent_rewriter_end_to_end():
    agent = agent_from("rewriter")
    session = create_session(agent)
    output = run_agent(session, "hello", MockProvider(), bus=EventBus())
    assert output == "MOCK[Rewriter]: hello"
    assert session.output_buffer == output
    assert session.clipboard_buffer == output  # post-action <copy/>
    assert session.phase == "idle"
    assert [m.role for m in session.chat_history] == ["user", "assistant"]


def test_run_agent_adviser_leaves_clipboard_alone():
    agent = agent_from("adviser")
    session = create_session(agent)
    run_agent(session, "x", MockProvider())
    assert session.clipboard_buffer == ""


def test_run_agent_deterministic_with_mock():
    agent = agent_from("checker")
    def snapshot():
        session = create_session(agent)
        session.memory["seed"] = "same"
        out = run_agent(session, "input text", MockProvider())
        return out, session.output_buffer, session.clipboard_buffer, tuple(session.chat_history)
    assert snapshot() == snapshot()


def test_run_agent_provider_failure_rolls_back():
    agent = agent_from("rewriter")
    session = create_session(agent)
    session.output_buffer = "untouched"
    with pytest.raises(ProviderError) as exc:
        run_agent(session, "x", FailingProvider())
    assert session.output_buffer == "untouched"
    assert session.phase == "idle"
    assert exc.value.run_phase == "called"
    assert session.chat_history == []


def test_run_agent_empty_input_fails_before_provider():
    calls = []

    class CountingProvider(MockProvider):
        def complete(self, request):
            calls.append(request)
            return super().complete(request)

    agent = agent_from("rewriter")
    session = create_session(agent)
    with pytest.raises(ValidationError) as exc:
        run_agent(session, "", CountingProvider())
    assert calls == []
    assert exc.value.run_phase == "prompted"
    assert session.phase == "idle"


def test_run_agent_busy_rejected():
    agent = agent_from("rewriter")
    session = create_session(agent)
    started = threading.Event()
    release = threading.Event()

    class BlockingProvider(MockProvider):
        def complete(self, request):
            started.set()
            release.wait(timeout=5)
            return super().complete(request)

    worker = threading.Thread(
        target=lambda: run_agent(session, "slow", BlockingProvider())
    )
    worker.start()
    assert started.wait(timeout=5)
    with pytest.raises(BusyError):
        run_agent(session, "second", MockProvider())
    release.set()
    worker.join(timeout=5)
    assert session.output_buffer == "MOCK[Rewriter]: slow"


def test_history_grows_by_two_per_run():
    agent = agent_from("translator")
    session = create_session(agent)
    for i in range(3):
        run_agent(session, f"turn {i}", MockProvider())
        assert len(session.chat_history) == 2 * (i + 1)
    roles = [m.role for m in session.chat_history]
    assert roles == ["user", "assistant"] * 3


def test_conversational_agent_sends_history():
    seen_messages = []

    class RecordingProvider(MockProvider):
        def complete(self, request):
            seen_messages.append([(m.role, m.content) for m in request.messages])
            return super().complete(request)

    translator = agent_from("translator")  # chatlist → conversational
    session = create_session(translator)
    run_agent(session, "one", RecordingProvider())
    run_agent(session, "two", RecordingProvider())
    assert [r for r, _ in seen_messages[0]] == ["system", "user"]
    assert [r for r, _ in seen_messages[1]] == ["system", "user", "assistant", "user"]

    rewriter = agent_from("rewriter")  # textarea → single-turn payloads
    session = create_session(rewriter)
    seen_messages.clear()
    run_agent(session, "one", RecordingProvider())
    run_agent(session, "two", RecordingProvider())
    assert [r for r, _ in seen_messages[1]] == ["system", "user"]


def test_pre_actions_run_before_prompt():
    xml = (
        '<agent name="P">'
        '<pre-action><store addr="salute">hi</store></pre-action>'
        '<prompt><system>s</system><user><load addr="salute"/> <input/></user></prompt>'
        "</agent>"
    )
    session = create_session(simple_agent(xml))
    output = run_agent(session, "there", MockProvider())
    assert output == "MOCK[P]: hi there"


def test_privacy_no_content_written_to_disk(tmp_path, monkeypatch):
    sentinel = "PRIVACY_SENTINEL_93d1f0"
    monkeypatch.chdir(tmp_path)
    agent = agent_from("rewriter")
    session = create_session(agent)
    output = run_agent(session, f"text {sentinel} end", MockProvider(), bus=EventBus())
    assert sentinel in output
    offenders = [
        p for p in tmp_path.rglob("*")
        if p.is_file() and sentinel.encode() in p.read_bytes()
    ]
    assert offenders == []
    assert list(tmp_path.iterdir()) == []  # the run creates no files at all


# --- OpenAI-compatible wire format ------------------------------------------


def test_openai_provider_wire_format():
    captured = {}

    def handler(request: httpx.Request) -> httpx.Response:
        captured["url"] = str(request.url)
        captured["auth"] = request.headers.get("authorization")
        captured["body"] = json.loads(request.content)
        return httpx.Response(
            200,
            json={"choices": [{"message": {"role": "assistant", "content": "polished"}}]},
        )

    provider = OpenAIProvider(
        "https://llm.test/v1", "sk-secret", transport=httpx.MockTransport(handler)
    )
    config = ModelConfig(model_id="gpt-4", temperature=0.3, max_tokens=512)
    bundle = PromptBundle(system="sys", user="raw text", model=config)
    result = call_model(config, bundle, provider, agent_name="Rewriter")
    assert result == "polished"
    assert captured["url"] == "https://llm.test/v1/chat/completions"
    assert captured["auth"] == "Bearer sk-secret"
    assert captured["body"] == {
        "model": "gpt-4",
        "messages": [
            {"role": "system", "content": "sys"},
            {"role": "user", "content": "raw text"},
        ],
        "temperature": 0.3,
        "max_tokens": 512,
    }


def _provider_returning(response_factory):
    return OpenAIProvider(
        "https://llm.test/v1", "k",
        transport=httpx.MockTransport(lambda request: response_factory(request)),
    )


def _call(provider):
    config = ModelConfig()
    bundle = PromptBundle(system="", user="u", model=config)
    return call_model(config, bundle, provider)


def test_openai_auth_error():
    provider = _provider_returning(lambda r: httpx.Response(401, json={"error": "no"}))
    with pytest.raises(AuthError):
        _call(provider)


def test_openai_token_overflow_classified():
    provider = _provider_returning(
        lambda r: httpx.Response(
            400,
            json={"error": {"message": "maximum context length exceeded", "code": "context_length_exceeded"}},
        )
    )
    with pytest.raises(TokenLimitError):
        _call(provider)


def test_openai_network_error():
    def raise_connect(request):
        raise httpx.ConnectError("refused", request=request)

    provider = _provider_returning(raise_connect)
    with pytest.raises(NetworkError):
        _call(provider)


def test_openai_malformed_response():
    provider = _provider_returning(lambda r: httpx.Response(200, json={"choices": []}))
    with pytest.raises(ProviderError):
        _call(provider)


def test_openai_server_error_classified_generic():
    provider = _provider_returning(lambda r: httpx.Response(500, json={"error": "boom"}))
    with pytest.raises(ProviderError) as exc:
        _call(provider)
    assert not isinstance(exc.value, (AuthError, NetworkError, TokenLimitError))
