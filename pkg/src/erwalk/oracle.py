"""Ground truth for hitting times that does not touch the spectrum.

Three routes: the first-passage linear system solved by LU factorization,
the fundamental matrix of the chain (one dense solve for all pairs), and
seeded Monte-Carlo simulation of the walk itself.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg

from erwalk import kernels
from erwalk.errors import Disconnected, SameVertex, SingularSystem
from erwalk.graph import Graph, is_connected, stationary_distribution

LINEAR_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class WalkEstimate:
    mean: float
    std_error: float
    samples: int
    max_steps_hit: bool

    def to_dict(self) -> dict:
        return asdict(self)


def first_passage_system(g: Graph, j: int):
    """Matrix ``I - Q`` and right-hand side for targets other than ``j``.

    Returns ``(matrix, rhs, keep)`` where ``keep`` lists the remaining vertices.
    """
    keep = np.delete(np.arange(g.n), j)
    a = g.adjacency_matrix()
    q = a[np.ix_(keep, keep)] / g.degrees[keep, None]
    return np.eye(keep.size) - q, np.ones(keep.size), keep


def hitting_times_linear(g: Graph, j: int) -> np.ndarray:
    """h_ij for all i, entry j equal to 0, by dense LU with partial pivoting."""
    if not is_connected(g):
        raise Disconnected()
    h = np.zeros(g.n)
    if g.n == 1:
        return h
    m, rhs, keep = first_passage_system(g, j)
    try:
        lu = scipy.linalg.lu_factor(m, check_finite=True)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise SingularSystem(str(exc)) from exc
    x = scipy.linalg.lu_solve(lu, rhs)
    resid = np.abs(m @ x - rhs).max()
    if not np.isfinite(resid):
        raise SingularSystem("non-finite solution")
    if resid > LINEAR_RESIDUAL_TOL:
        x = x + scipy.linalg.lu_solve(lu, rhs - m @ x)
    h[keep] = x
    return h


def hitting_time_matrix_linear(g: Graph) -> np.ndarray:
    """Column ``j`` holds ``hitting_times_linear(g, j)``."""
    return np.column_stack([hitting_times_linear(g, j) for j in range(g.n)])


def hitting_time_matrix_fundamental(g: Graph) -> np.ndarray:
    """All h_ij from Z = (I - P + 1 pi^T)^{-1}: h_ij = (Z_jj - Z_ij) / pi_j.

    One O(n^3) solve instead of n of them; used where the per-target LU
    route is too slow.
    """
    if not is_connected(g):
        raise Disconnected()
    n = g.n
    pi = stationary_distribution(g) if n > 1 else np.ones(1)
    p = g.adjacency_matrix() / g.degrees[:, None] if n > 1 else np.zeros((1, 1))
    m = np.eye(n) - p + pi[None, :]
    try:
        z = scipy.linalg.solve(m, np.eye(n), check_finite=True)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise SingularSystem(str(exc)) from exc
    if not np.isfinite(z).all():
        raise SingularSystem("non-finite fundamental matrix")
    h = (np.diag(z)[None, :] - z) / pi[None, :]
    np.fill_diagonal(h, 0.0)
    return h


def random_target_time_oracle(g: Graph, j: int) -> float:
    return float(stationary_distribution(g) @ hitting_times_linear(g, j))


def _chunk_bounds(samples: int, workers: int):
    edges = np.linspace(0, samples, workers + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _walk_chunk(args):
    indptr, indices, i, j, seed, start, stop, max_steps = args
    hits = kernels.walk_hits(indptr, indices, i, j, seed, start, stop, max_steps)
    truncated = bool((hits > max_steps).any())
    hits = np.minimum(hits, max_steps)
    # python ints keep the moment sums exact whatever the chunking
    return int(hits.sum()), int((hits * hits).sum()), truncated


def simulate_walk(g: Graph, i: int, j: int, samples: int, seed: int,
                  max_steps: int | None = None, workers: int = 1) -> WalkEstimate:
    """Monte-Carlo estimate of h_ij.

    Sample ``s`` uses its own random stream, so the estimate depends only on
    ``(seed, samples, max_steps)`` and not on ``workers``.  Walks still short
    of ``j`` after ``max_steps`` count as ``max_steps`` and set the flag.
    """
    if i == j:
        raise SameVertex(f"source and target are both {i}")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if not is_connected(g):
        raise Disconnected()
    if max_steps is None:
        max_steps = 100 * g.n * g.n
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    tasks = [
        (g.indptr, g.indices, int(i), int(j), int(seed), a, b, int(max_steps))
        for a, b in _chunk_bounds(samples, max(1, workers))
    ]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_walk_chunk, tasks))
    else:
        parts = [_walk_chunk(t) for t in tasks]
    s1 = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    mean = s1 / samples
    if samples > 1:
        var = (samples * s2 - s1 * s1) / (samples * (samples - 1))
        std_error = (var / samples) ** 0.5
    else:
        std_error = 0.0
    return WalkEstimate(mean, std_error, samples, any(p[2] for p in parts))
