from __future__ import annotations

import sys
from pathlib import Path

import pytest

from agentforge.engine import AgentEngine
from agentforge.service import builtin_templates_dir

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def templates_dir() -> Path:
    return builtin_templates_dir()


@pytest.fixture
def engine() -> AgentEngine:
    eng = AgentEngine()
    eng.load_directory(builtin_templates_dir())
    return eng


def pytest_runtest_logreport(report):
    # One visible pass/fail line per acceptance criterion.
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    status = "PASS" if report.passed else "FAIL"
    print(f"\n[ACCEPTANCE] {name}: {status}", file=sys.stderr, flush=True)
