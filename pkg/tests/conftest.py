import math

import pytest

from sturmkit.potential import PiecewisePotential, build_theorem1_q2

PI = math.pi


@pytest.fixture
def one():
    return PiecewisePotential.constant(1.0)


@pytest.fixture
def step_half():
    return build_theorem1_q2(0.5)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
