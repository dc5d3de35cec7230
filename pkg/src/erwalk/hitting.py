"""Hitting, target, starting and commute times from the spectrum of B.

All quantities are measured in walk steps.  Formulas need a connected graph
so that every non-Perron eigenvalue satisfies ``lambda_k < 1``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from erwalk.errors import ConvergenceFailure, Disconnected, GapZeroDivergence, SameVertex
from erwalk.graph import Graph, is_connected
from erwalk.spectral import SpectralDecomposition

# a gap at or below this is treated as zero (bipartite component in the spectrum)
GAP_ZERO_TOL = 1e-10
DUAL_FORM_RTOL = 1e-8


@dataclass(frozen=True)
class HittingReport:
    n: int
    p: float | None
    seed: int | None
    target: int
    H_target: float
    lower: float
    upper: float
    H_start: float
    gap: float
    lambda2_abs: float
    lambdaN_abs: float

    def to_dict(self) -> dict:
        """Flat JSON-ready mapping; an infinite upper bound becomes ``None``."""
        out = asdict(self)
        if math.isinf(out["upper"]):
            out["upper"] = None
        return out


def _require_connected(g: Graph):
    if not is_connected(g):
        raise Disconnected()


def _distinct(i, j):
    if i == j:
        raise SameVertex(f"hitting time undefined for i == j == {i}")


def inverse_gaps(d: SpectralDecomposition) -> np.ndarray:
    """``1 / (1 - lambda_k)`` for k = 2..N."""
    gaps = 1.0 - d.eigenvalues[1:]
    if gaps.size and gaps.min() <= GAP_ZERO_TOL:
        raise GapZeroDivergence("eigenvalue 1 is not simple; the graph is disconnected")
    return 1.0 / gaps


def _green(g: Graph, d: SpectralDecomposition) -> np.ndarray:
    """Sum over k >= 2 of u_k u_k^T / (1 - lambda_k), with u_kj = v_kj / sqrt(d_j)."""
    u = d.eigenvectors[1:] / np.sqrt(g.degrees.astype(np.float64))
    return u.T @ (inverse_gaps(d)[:, None] * u)


def hitting_time_spectral(g: Graph, d: SpectralDecomposition, i: int, j: int) -> float:
    _distinct(i, j)
    _require_connected(g)
    w = inverse_gaps(d)
    v = d.eigenvectors[1:]
    di, dj = float(g.degrees[i]), float(g.degrees[j])
    terms = v[:, j] ** 2 / dj - v[:, i] * v[:, j] / math.sqrt(di * dj)
    return float(2.0 * g.edge_count * (w @ terms))


def hitting_time_matrix(g: Graph, d: SpectralDecomposition) -> np.ndarray:
    """All h_ij at once; entry ``[i, j]`` is the time from i to j, diagonal 0."""
    _require_connected(g)
    green = _green(g, d)
    h = 2.0 * g.edge_count * (np.diag(green)[None, :] - green)
    np.fill_diagonal(h, 0.0)
    return h


def random_target_times(g: Graph, d: SpectralDecomposition) -> np.ndarray:
    _require_connected(g)
    w = inverse_gaps(d)
    weighted = w @ (d.eigenvectors[1:] ** 2)
    return 2.0 * g.edge_count / g.degrees * weighted


def random_target_time(g: Graph, d: SpectralDecomposition, j: int) -> float:
    _require_connected(g)
    w = inverse_gaps(d)
    return float(2.0 * g.edge_count / g.degrees[j] * (w @ d.eigenvectors[1:, j] ** 2))


def random_start_time(d: SpectralDecomposition) -> float:
    return float(inverse_gaps(d).sum())


def commute_time(g: Graph, d: SpectralDecomposition, i: int, j: int) -> float:
    """Round-trip time, cross-checked between h_ij + h_ji and the squared form."""
    _distinct(i, j)
    _require_connected(g)
    w = inverse_gaps(d)
    v = d.eigenvectors[1:]
    diff = v[:, j] / math.sqrt(g.degrees[j]) - v[:, i] / math.sqrt(g.degrees[i])
    square_form = float(2.0 * g.edge_count * (w @ diff**2))
    sum_form = hitting_time_spectral(g, d, i, j) + hitting_time_spectral(g, d, j, i)
    if abs(square_form - sum_form) > DUAL_FORM_RTOL * abs(square_form):
        raise ConvergenceFailure(
            f"commute time forms disagree: {square_form!r} vs {sum_form!r}"
        )
    return square_form


def commute_time_matrix(g: Graph, d: SpectralDecomposition) -> np.ndarray:
    _require_connected(g)
    green = _green(g, d)
    diag = np.diag(green)
    k = 2.0 * g.edge_count * (diag[:, None] + diag[None, :] - 2.0 * green)
    np.fill_diagonal(k, 0.0)
    return k


def _inverse_gap_bound(d: SpectralDecomposition) -> float:
    gap = 1.0 - d.lambda_star
    return math.inf if gap <= GAP_ZERO_TOL else 1.0 / gap


def target_time_bounds(g: Graph, d: SpectralDecomposition, j: int) -> tuple[float, float]:
    """Lower and upper bound on H_j; the upper bound is +inf for a zero gap."""
    _require_connected(g)
    ratio = 2.0 * g.edge_count / g.degrees[j]
    inv = _inverse_gap_bound(d)
    upper = math.inf if math.isinf(inv) else (ratio - 1.0) * inv
    return float(ratio - 2.0), float(upper)


def commute_time_bounds(g: Graph, d: SpectralDecomposition, i: int, j: int) -> tuple[float, float]:
    _distinct(i, j)
    _require_connected(g)
    e = float(g.edge_count)
    harmonic = 1.0 / g.degrees[i] + 1.0 / g.degrees[j]
    inv = _inverse_gap_bound(d)
    upper = math.inf if math.isinf(inv) else 2.0 * e * harmonic * inv
    return float(e * harmonic), float(upper)


def hitting_report(g: Graph, d: SpectralDecomposition, j: int, p=None, seed=None,
                   H_start: float | None = None) -> HittingReport:
    lower, upper = target_time_bounds(g, d, j)
    return HittingReport(
        n=g.n,
        p=p,
        seed=seed,
        target=int(j),
        H_target=random_target_time(g, d, j),
        lower=lower,
        upper=upper,
        H_start=random_start_time(d) if H_start is None else H_start,
        gap=1.0 - d.lambda_star,
        lambda2_abs=abs(d.lambda2),
        lambdaN_abs=abs(d.lambdaN),
    )
