import numpy as np
import pytest

from clockgap.circuit import Circuit, Gate, standard_circuit

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


@pytest.fixture
def bell():
    return standard_circuit(2, [("h", [0]), ("cnot", [0, 1])])


@pytest.fixture
def identity_circuit():
    return Circuit(1, (Gate("custom", (0,), np.eye(2)),))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
