import sys

import pytest

from qcoha.quiver import Quiver
from qcoha.specio import load_spec


@pytest.fixture(scope="session")
def quivers():
    names = ["one_loop", "no_arrow", "two_loop", "three_loop", "sym2v"]
    return {n: load_spec(n).quiver for n in names}


@pytest.fixture
def one_loop():
    return Quiver.loops(1)


@pytest.fixture
def no_arrow():
    return Quiver.loops(0)


@pytest.fixture
def three_loop():
    return load_spec("three_loop").quiver


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.report_lines():
        terminalreporter.write_line(line)
