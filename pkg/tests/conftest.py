import pytest

from sshladder import ChainSpec

# (J1, J2) in kHz for J1/J2 = 0.2, 0.5, 1, 2, 5
PAPER_SETS = [(160.0, 800.0), (400.0, 800.0), (400.0, 400.0), (800.0, 400.0), (800.0, 160.0)]


@pytest.fixture
def uniform_chain():
    return ChainSpec(3, 400.0, 400.0)


@pytest.fixture
def topological_chain():
    return ChainSpec(3, 160.0, 800.0)


@pytest.fixture
def trivial_chain():
    return ChainSpec(3, 800.0, 160.0)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
