import math

import numpy as np
import pytest

from zlab import spectral as sp


@pytest.fixture
def grid_pi():
    return sp.make_grid(math.pi, 16)


@pytest.fixture
def grid128():
    return sp.make_grid(math.pi, 128)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def sine(grid, modes, dtype=float):
    c = np.zeros(grid.N, dtype=dtype)
    for k, a in modes.items():
        c[k - 1] = a
    return sp.from_coeffs(c, sp.Parity.SINE, grid)


def cosine(grid, modes):
    c = np.zeros(grid.N + 1)
    for k, a in modes.items():
        c[k] = a
    return sp.from_coeffs(c, sp.Parity.COSINE, grid)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
