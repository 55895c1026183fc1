import json
from pathlib import Path

import pytest

from downward.expr import Atom, Composition, Difference, Intersection, Union

FIXTURES = Path(__file__).parent / "fixtures"

_OPS = {"|": Union, "&": Intersection, "-": Difference, ".": Composition}


def tree(node):
    """Build an expression from a nested ``[op, left, right]`` list."""
    if isinstance(node, str):
        return Atom(node)
    op, left, right = node
    return _OPS[op](tree(left), tree(right))


@pytest.fixture
def fixture_text():
    return lambda name: (FIXTURES / name).read_text()


@pytest.fixture(scope="session")
def golden():
    return {k: tree(v) for k, v in json.loads((FIXTURES / "golden.json").read_text()).items()}


# One summary line per acceptance criterion, after the normal report.
_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
