import sys

import numpy as np
import pytest

from pilab.acceptance import M4_CONFIG
from pilab.painleve import BvpConfig, solve_pole_free


@pytest.fixture(scope="session")
def m2_solution():
    return solve_pole_free(BvpConfig(m=2, S=40, N=2000))


@pytest.fixture(scope="session")
def m4_solution():
    return solve_pole_free(BvpConfig(m=4, S=60, **M4_CONFIG))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    lines = getattr(mod, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
