import pytest

from agentforge.compiler import compile_agent, load_agent_template
from agentforge.directives import builtin_registry
from agentforge.errors import CompileError, ValidationError
from agentforge.parser import parse_template
from agentforge.service import builtin_templates_dir

REGISTRY = builtin_registry()


def load(name):
    text = (builtin_templates_dir() / f"{name}.agent.xml").read_text()
    definition, report, diagnostics = load_agent_template(text, REGISTRY, filename=name)
    assert definition is not None, diagnostics
    assert diagnostics == []
    return definition


def test_rewriter_fields():
    agent = load("rewriter")
    assert agent.name == "Rewriter"
    assert agent.icon == "text-box-edit-outline"
    assert agent.desc == "Academic Rewriter"
    assert agent.model.model_id == "gpt-3.5-turbo"
    assert agent.model.temperature == 0.7
    assert agent.model.max_tokens == 2000
    assert [n.name for n in agent.post_actions] == ["copy"]
    assert agent.pre_actions == ()
    assert agent.prompt_template is not None


def test_rewriter_workspace_layout():
    agent = load("rewriter")
    assert agent.workspace.kinds == ("toolbar", "textarea", "inputarea", "actions")
    toolbar, _, _, actions = agent.workspace.components
    assert [b.preset for b in toolbar.actions] == ["copy", "clear"]
    assert [b.preset for b in actions.actions] == ["send-input"]
    assert actions.actions[0].bind == "btn.send"


def test_translator_uses_chatlist():
    agent = load("translator")
    assert agent.workspace.has("chatlist")
    assert not agent.workspace.has("textarea")
    assert agent.conversational
    assert [n.name for n in agent.post_actions] == ["copy"]


def test_adviser_has_no_inputarea_and_no_post_action():
    agent = load("adviser")
    assert agent.workspace.kinds == ("toolbar", "textarea", "actions")
    assert not agent.workspace.has("inputarea")
    assert agent.post_actions == ()
    toolbar = agent.workspace.components[0]
    assert [b.preset for b in toolbar.actions] == ["clear", "copy"]


def test_checker_has_no_bottom_actions_bar():
    agent = load("checker")
    assert agent.workspace.kinds == ("toolbar", "textarea", "inputarea")
    assert agent.post_actions == ()


def test_rewriter_system_prompt_preserved():
    agent = load("rewriter")
    system = agent.prompt_template.first("system")
    text = system.text_content()
    assert text.startswith("I hope you act like a professional academic rewriter.")
    assert "\n" in text  # multi-line requirements list survives verbatim
    assert text.endswith("Here is the To-be-revised content:")


def test_missing_name_is_compile_error():
    with pytest.raises(CompileError):
        compile_agent(parse_template("<agent/>"), REGISTRY)


def test_root_must_be_agent():
    with pytest.raises(CompileError):
        compile_agent(parse_template("<prompt/>"), REGISTRY)


def test_duplicate_singleton_child_rejected():
    xml = '<agent name="x"><model>m1</model><model>m2</model></agent>'
    with pytest.raises(CompileError) as exc:
        compile_agent(parse_template(xml), REGISTRY)
    assert "<model>" in str(exc.value)


def test_model_defaults_applied_when_absent():
    agent = compile_agent(parse_template('<agent name="x"/>'), REGISTRY,
                          default_model_id="test-model")
    assert agent.model.model_id == "test-model"
    assert agent.model.temperature == 0.7
    assert agent.model.max_tokens == 2000


def test_model_out_of_range_temperature_fails():
    xml = '<agent name="x"><model temperature="2.5">m</model></agent>'
    with pytest.raises(CompileError):
        compile_agent(parse_template(xml), REGISTRY)


def test_two_display_areas_rejected():
    xml = (
        '<agent name="x"><preset><workspace>'
        "<textarea /><chatlist />"
        "</workspace></preset></agent>"
    )
    with pytest.raises(ValidationError):
        compile_agent(parse_template(xml), REGISTRY)


def test_bindings_compiled_to_key_bindings():
    xml = (
        '<agent name="x"><preset>'
        "<workspace><textarea /></workspace>"
        '<bindings><keydown key="control+shift+b" present="true" preset="send-input"/></bindings>'
        "</preset></agent>"
    )
    agent = compile_agent(parse_template(xml), REGISTRY)
    [binding] = agent.bindings
    assert binding.event == "window.keydown.control.shift.b"
    assert binding.present_only is True
    assert binding.preset == "send-input"


def test_keydown_scope_respected():
    xml = (
        '<agent name="x"><preset><workspace/>'
        '<bindings><keydown scope="global" key="meta+q"/></bindings>'
        "</preset></agent>"
    )
    agent = compile_agent(parse_template(xml), REGISTRY)
    assert agent.bindings[0].event == "global.keydown.meta.q"


def test_pipeline_reports_malformed_template():
    definition, _, diagnostics = load_agent_template("<agent><prompt></agent>", REGISTRY,
                                                     filename="bad.agent.xml")
    assert definition is None
    assert len(diagnostics) == 1
    assert diagnostics[0].startswith("bad.agent.xml:1:")
    assert ": error: " in diagnostics[0]


def test_pipeline_reports_validation_errors():
    definition, report, diagnostics = load_agent_template(
        '<agent name="x"><system>S</system></agent>', REGISTRY
    )
    assert definition is None
    assert not report.is_ok
    assert any("dependence" not in line or "system" in line for line in diagnostics)


def test_pipeline_registers_template_predefs():
    xml = (
        '<agent name="x">'
        '<predef name="greet"><text>hello </text><input/></predef>'
        "<prompt><system>s</system><user><greet>ignored</greet></user></prompt>"
        "</agent>"
    )
    definition, _, diagnostics = load_agent_template(xml, REGISTRY)
    assert definition is not None, diagnostics
    assert definition.registry.resolve("greet").user_defined


def test_action_without_preset_or_body_rejected():
    xml = (
        '<agent name="x"><preset><workspace>'
        '<actions><action desc="nothing"/></actions>'
        "</workspace></preset></agent>"
    )
    with pytest.raises(ValidationError):
        compile_agent(parse_template(xml), REGISTRY)
