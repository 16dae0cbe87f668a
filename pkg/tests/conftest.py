import numpy as np
import pytest

from hbarcheck.gaussian import GaussianState
from hbarcheck.wignergrid import (
    GridWavefunction,
    PositionGrid,
    gaussian_wigner_grid,
    hermite_wavefunction,
    wigner_transform,
)

SIGMA_X = np.sqrt(0.5)


@pytest.fixture(scope="session")
def grid():
    return PositionGrid(12.0, 256)


@pytest.fixture(scope="session")
def coherent_state():
    return GaussianState(np.diag([0.5, 0.5]))


@pytest.fixture(scope="session")
def coherent_psi(grid):
    return hermite_wavefunction(0, SIGMA_X, grid)


@pytest.fixture(scope="session")
def coherent_w(coherent_psi):
    return wigner_transform(coherent_psi)


@pytest.fixture(scope="session")
def sampled_coherent_w(grid, coherent_state):
    return gaussian_wigner_grid(coherent_state, grid)


@pytest.fixture(scope="session")
def hermite1_psi(grid):
    return hermite_wavefunction(1, SIGMA_X, grid)


@pytest.fixture(scope="session")
def hermite1_w(hermite1_psi):
    return wigner_transform(hermite1_psi)


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


def random_spd(rng, dim, floor=0.1):
    a = rng.normal(size=(dim, dim))
    return a @ a.T + floor * np.eye(dim)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
