import numpy as np
import pytest

from volterra_qso import VolterraMatrix, counterexample_operator


@pytest.fixture
def cyclic():
    return counterexample_operator()


@pytest.fixture
def chain3():
    # edges 1->2, 1->3, 2->3: transitive; interior orbits end at e3
    return VolterraMatrix.from_upper(3, [-0.5, -0.7, -0.3])


def rng(seed=0):
    return np.random.default_rng(seed)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
