import numpy as np
import pytest

from rbolab.functionals import WaveParams
from rbolab.ground_state import petviashvili_solve
from rbolab.soliton import SolitonSpec, bo_soliton
from rbolab.spectral import Grid

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def desk_grid():
    return Grid(4096, 128.0)


@pytest.fixture(scope="session")
def q1(desk_grid):
    return bo_soliton(SolitonSpec(1.0), desk_grid)


@pytest.fixture(scope="session")
def gs_001(desk_grid):
    return petviashvili_solve(WaveParams(1.0, 0.01), desk_grid)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
