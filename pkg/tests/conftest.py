import numpy as np
import pytest

from nbwalk import graph as G

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def gap_family(count=200, seed=2024):
    """Connected non-bipartite graphs, 3 <= D(x) <= 8, |V| <= 40."""
    rng = np.random.default_rng(seed)
    out = []
    s = 0
    while len(out) < count:
        s += 1
        n = int(rng.integers(5, 41))
        dmax = int(rng.integers(3, 9))
        try:
            if rng.random() < 0.2 and (n * 3) % 2 == 0:
                g = G.random_regular(n, 3, seed=s)
            else:
                g = G.random_min_degree(n, 3, dmax, seed=s)
        except Exception:
            continue
        rep = G.validate(g)
        if rep.meets_gap_hypotheses:
            out.append(g)
    return out


def det_family(count=100, seed=7):
    """Connected graphs with minimum degree 2 and |V| <= 50."""
    rng = np.random.default_rng(seed)
    out = []
    s = 0
    while len(out) < count:
        s += 1
        n = int(rng.integers(3, 51))
        dmax = int(rng.integers(2, 7))
        try:
            g = G.random_min_degree(n, 2, dmax, seed=1000 + s)
        except Exception:
            continue
        if G.validate(g).is_connected:
            out.append(g)
    return out


@pytest.fixture(scope="session")
def triangle():
    return G.cycle(3)


@pytest.fixture(scope="session")
def k4():
    return G.complete(4)


@pytest.fixture(scope="session")
def c4():
    return G.cycle(4)
