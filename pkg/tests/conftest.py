from fractions import Fraction

import numpy as np
import pytest

from erwalk._rng import derive_seed
from erwalk.graph import GnpParams, is_connected, sample_gnp

ACCEPTANCE_LINES = []


def exact_hitting_times(adjacency, target):
    """h_{i,target} for every i by Gauss-Jordan elimination over the rationals."""
    n = len(adjacency)
    rest = [i for i in range(n) if i != target]
    col = {v: k for k, v in enumerate(rest)}
    m = len(rest)
    rows = []
    for i in rest:
        row = [Fraction(0)] * (m + 1)
        row[col[i]] += 1
        nbrs = adjacency[i]
        for w in nbrs:
            if w != target:
                row[col[w]] -= Fraction(1, len(nbrs))
        row[m] = Fraction(1)
        rows.append(row)
    for c in range(m):
        piv = next(r for r in range(c, m) if rows[r][c] != 0)
        rows[c], rows[piv] = rows[piv], rows[c]
        inv = 1 / rows[c][c]
        rows[c] = [x * inv for x in rows[c]]
        for r in range(m):
            if r != c and rows[r][c] != 0:
                f = rows[r][c]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[c])]
    h = [Fraction(0)] * n
    for k, i in enumerate(rest):
        h[i] = rows[k][m]
    return h


def connected_samples(count, grid, base_seed):
    """First ``count`` connected G(n, p) samples cycling over ``grid``."""
    out = []
    attempt = 0
    while len(out) < count:
        n, p = grid[attempt % len(grid)]
        seed = derive_seed(base_seed, n, int(p * 1000), attempt)
        g = sample_gnp(GnpParams(n, p, seed))
        if is_connected(g):
            out.append((n, p, seed, g))
        attempt += 1
    return out


@pytest.fixture(scope="session")
def er_samples():
    """Connected samples over n in {20, 50, 100}, p in {0.2, 0.5}."""
    grid = [(n, p) for n in (20, 50, 100) for p in (0.2, 0.5)]
    return connected_samples(100, grid, base_seed=20261015)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
