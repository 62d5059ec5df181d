"""Static checks over parsed directive trees.

Validation never raises for template problems: every finding lands in the
report with its source location, and `is_ok` reflects whether any of them is
an error. Parameters that fall back to schema defaults are recorded so tools
can show the effective configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .directives import DirectiveSpec, Registry
from .errors import PermissionDeniedError, UnknownDirectiveError
from .parser import DirectiveNode

SEVERITIES = ("error", "warning")


@dataclass(frozen=True)
class Finding:
    severity: str
    kind: str
    message: str
    line: int
    col: int

    def format(self, filename: str = "<template>") -> str:
        return f"{filename}:{self.line}:{self.col}: {self.severity}: {self.message}"


@dataclass(frozen=True)
class ResolvedDefault:
    directive: str
    param: str
    value: str
    line: int
    col: int


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)
    resolved_defaults: list[ResolvedDefault] = field(default_factory=list)

    @property
    def is_ok(self) -> bool:
        return not any(f.severity == "error" for f in self.findings)

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "error"]

    def format(self, filename: str = "<template>") -> list[str]:
        return [f.format(filename) for f in self.findings]


def validate_tree(root: DirectiveNode, registry: Registry) -> ValidationReport:
    """Check directive existence, privileges, dependences, and parameters."""
    report = ValidationReport()
    _walk(root, registry, (), report)
    return report


def _walk(
    node: DirectiveNode,
    registry: Registry,
    ancestors: tuple[str, ...],
    report: ValidationReport,
) -> None:
    spec = _check_node(node, registry, ancestors, report)
    if spec is not None and node.name == "diff":
        _check_diff_children(node, report)
    child_ancestors = ancestors + (node.name,)
    for child in node.children():
        _walk(child, registry, child_ancestors, report)


def _check_node(
    node: DirectiveNode,
    registry: Registry,
    ancestors: tuple[str, ...],
    report: ValidationReport,
) -> DirectiveSpec | None:
    try:
        spec = registry.resolve(node.name)
    except UnknownDirectiveError:
        _finding(report, "error", "unknown-directive", f'unknown directive "{node.name}"', node)
        return None
    except PermissionDeniedError as exc:
        _finding(
            report, "error", "permission",
            f'directive "{node.name}" requires privilege {exc.required}, '
            f"user has {exc.granted}",
            node,
        )
        return None
    if spec.dependence and spec.dependence not in ancestors:
        _finding(
            report, "error", "dependence",
            f'"{node.name}" requires "{spec.dependence}" '
            f'(must appear inside a "{spec.dependence}" body)',
            node,
        )
    _check_params(node, spec, report)
    return spec


def _check_params(node: DirectiveNode, spec: DirectiveSpec, report: ValidationReport) -> None:
    for key, value in node.params.items():
        param = spec.param(key)
        if param is None:
            _finding(
                report, "error", "unknown-param",
                f'"{node.name}" has no parameter "{key}"', node,
            )
            continue
        problem = _type_problem(param, value)
        if problem:
            _finding(
                report, "error", "param-type",
                f'parameter "{key}" of "{node.name}" {problem}', node,
            )
    for param in spec.params:
        if param.key in node.params:
            continue
        if param.default is not None:
            report.resolved_defaults.append(
                ResolvedDefault(node.name, param.key, param.default, node.line, node.col)
            )
        elif param.required:
            _finding(
                report, "error", "missing-param",
                f'"{node.name}" is missing required parameter "{param.key}"', node,
            )


def _type_problem(param, value: str) -> str | None:
    if param.type == "int":
        try:
            int(value)
        except ValueError:
            return f"must be an integer, got {value!r}"
    elif param.type == "float":
        try:
            float(value)
        except ValueError:
            return f"must be a number, got {value!r}"
    elif param.type == "bool":
        if value.lower() not in ("true", "false"):
            return f"must be true or false, got {value!r}"
    elif param.type == "enum":
        if value not in param.choices:
            return f"must be one of {list(param.choices)}, got {value!r}"
    return None


def _check_diff_children(node: DirectiveNode, report: ValidationReport) -> None:
    names = [child.name for child in node.children()]
    for required in ("source", "target"):
        if required not in names:
            _finding(
                report, "error", "diff-children",
                f'"diff" requires a <{required}> child', node,
            )
    if "source" in names and "target" in names:
        if names.index("target") < names.index("source"):
            _finding(
                report, "warning", "source-target-order",
                "<target> appears before <source>; diff reads source first", node,
            )


def _finding(
    report: ValidationReport, severity: str, kind: str, message: str, node: DirectiveNode
) -> None:
    report.findings.append(Finding(severity, kind, message, node.line, node.col))
