import numpy as np
import pytest

from quantile_motion.density import DensitySeries, Grid1D


@pytest.fixture
def unit_grid():
    return Grid1D(0.0, 1.0, 5)


@pytest.fixture
def uniform_series(unit_grid):
    return DensitySeries(unit_grid, np.arange(5) * 0.1, np.ones((5, 5)))


def translating_gaussian(v=0.5, sigma=1.0, x_range=(-12.0, 12.0), n=481, times=None):
    """Rigidly moving normal density, sampled analytically."""
    grid = Grid1D(*x_range, n)
    times = np.linspace(0.0, 2.0, 21) if times is None else np.asarray(times)
    x = grid.nodes
    vals = np.exp(-((x[None, :] - v * times[:, None]) ** 2) / (2 * sigma**2)) / np.sqrt(2 * np.pi) / sigma
    return DensitySeries(grid, times, vals)


# Acceptance verdicts, one line per criterion, repeated after the test summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
