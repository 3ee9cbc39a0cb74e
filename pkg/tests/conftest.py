import numpy as np
import pytest

from steerfuse.binning import make_space

# verdict lines filled in by the acceptance tests, echoed after the run
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def space11():
    return make_space(11)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def one_hot(n, i):
    p = np.zeros(n)
    p[i] = 1.0
    return p


def random_curve(rng, n, scale=10.0):
    """Random polyline with strictly positive arc length."""
    steps = rng.normal(size=(n - 1, 2)) * scale / n
    steps[np.all(steps == 0.0, axis=1)] = (0.1, 0.1)
    start = rng.normal(size=2) * scale
    return np.vstack([start, start + np.cumsum(steps, axis=0)])
