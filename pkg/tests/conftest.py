import numpy as np
import pytest

from tracenet.network import DaySnapshot, TemporalContactGraph
from tracenet.synthetic import synthetic_graph


@pytest.fixture(scope="session")
def school():
    return synthetic_graph()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_day(rng, n, m, max_d=50):
    a = rng.integers(0, n, size=m)
    b = rng.integers(0, n, size=m)
    keep = a != b
    return DaySnapshot.from_arrays(n, a[keep], b[keep], rng.integers(1, max_d, size=keep.sum()))


@pytest.fixture
def small_graph(rng):
    days = tuple(random_day(rng, 30, 60) for _ in range(7))
    return TemporalContactGraph(30, days)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
