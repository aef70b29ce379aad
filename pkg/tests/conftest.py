import numpy as np
import pytest

from wavemaplab.grid import build_grid


@pytest.fixture(scope="session")
def grid16():
    return build_grid(16, 5)


@pytest.fixture(scope="session")
def grid32():
    return build_grid(32, 5)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
