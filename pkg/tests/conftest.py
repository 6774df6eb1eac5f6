import pytest

from uwenergy.channel import ChannelEnv
from uwenergy.objective import ProblemInstance

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def env():
    return ChannelEnv()


@pytest.fixture(scope="session")
def inst_1km():
    return ProblemInstance.at(1_000.0, 0.99)


@pytest.fixture(scope="session")
def inst_10km():
    return ProblemInstance.at(10_000.0, 0.98)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
