"""Normalized adjacency matrix, its eigendecomposition and gap diagnostics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from erwalk.errors import ConvergenceFailure, DegenerateScaling, IsolatedVertex
from erwalk.graph import Graph

ORTHO_TOL = 1e-8
RESIDUAL_TOL = 1e-8  # multiplied by N
CLUSTER_TOL = 1e-10


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenpairs of B sorted by descending eigenvalue.

    Row ``k`` of ``eigenvectors`` is the eigenvector for ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    perron_aligned: bool

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    @property
    def lambda2(self) -> float:
        return float(self.eigenvalues[1])

    @property
    def lambdaN(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def lambda_star(self) -> float:
        """Largest modulus among the non-Perron eigenvalues."""
        return max(abs(self.lambda2), abs(self.lambdaN))


@dataclass(frozen=True)
class AdjacencySpectrum:
    nu: np.ndarray
    mu_scaled: np.ndarray | None


@dataclass(frozen=True)
class Lambda2Relation:
    lhs: float
    rhs: float
    nu2_over_Np: float
    remainder: float
    complete: bool

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + 1e-10


def _require_degrees(g: Graph) -> np.ndarray:
    d = g.degrees
    zero = np.flatnonzero(d == 0)
    if zero.size:
        raise IsolatedVertex(int(zero[0]))
    return d.astype(np.float64)


def build_normalized_adjacency(g: Graph) -> np.ndarray:
    """B with entries ``1/sqrt(d_i d_j)`` on edges and zero elsewhere."""
    inv_sqrt = 1.0 / np.sqrt(_require_degrees(g))
    src = np.repeat(np.arange(g.n), g.degrees)
    b = np.zeros((g.n, g.n))
    b[src, g.indices] = inv_sqrt[src] * inv_sqrt[g.indices]
    return b


def _orthonormalize_clusters(vals, vecs):
    """Re-orthonormalize eigenvector columns of numerically tied eigenvalues."""
    n = vals.size
    start = 0
    for k in range(1, n + 1):
        if k == n or vals[k - 1] - vals[k] > CLUSTER_TOL * max(1.0, abs(vals[k - 1])):
            if k - start > 1:
                q, _ = np.linalg.qr(vecs[:, start:k])
                vecs[:, start:k] = q
            start = k
    return vecs


def _decomposition_errors(b, vals, rows):
    n = vals.size
    ortho = np.abs(rows @ rows.T - np.eye(n)).max()
    resid = np.linalg.norm(b @ rows.T - rows.T * vals, axis=0).max()
    return ortho, resid


def eigendecompose(b: np.ndarray, driver: str = "ev", check: bool = True) -> SpectralDecomposition:
    """Full symmetric eigendecomposition with deterministic signs.

    ``driver`` selects the LAPACK routine; the default ``"ev"`` is Householder
    tridiagonalization followed by implicit QL/QR.  If the result misses the
    orthonormality or residual tolerance, divide-and-conquer is tried once
    before giving up.
    """
    b = np.asarray(b, dtype=np.float64)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError("matrix must be square")
    if b.size and np.abs(b - b.T).max() > 1e-12:
        raise ValueError("matrix is not symmetric within 1e-12")
    n = b.shape[0]
    drivers = [driver] + [d for d in ("evd",) if d != driver]
    last = None
    for drv in drivers:
        try:
            vals, vecs = scipy.linalg.eigh(b, driver=drv)
        except (np.linalg.LinAlgError, ValueError) as exc:
            last = str(exc)
            continue
        vals = vals[::-1].copy()
        vecs = _orthonormalize_clusters(vals, vecs[:, ::-1].copy())
        rows = np.ascontiguousarray(vecs.T)
        if not check:
            break
        ortho, resid = _decomposition_errors(b, vals, rows)
        if ortho <= ORTHO_TOL and resid <= RESIDUAL_TOL * n:
            break
        last = f"orthonormality {ortho:.3g}, residual {resid:.3g}"
    else:
        raise ConvergenceFailure(f"eigensolver did not meet tolerance: {last}")

    if rows[0].sum() < 0:
        rows[0] = -rows[0]
    perron_aligned = bool(np.all(rows[0] >= -1e-10))
    for k in range(1, n):
        if rows[k, np.argmax(np.abs(rows[k]))] < 0:
            rows[k] = -rows[k]
    vals.setflags(write=False)
    rows.setflags(write=False)
    return SpectralDecomposition(vals, rows, perron_aligned)


def decompose(g: Graph, driver: str = "ev") -> SpectralDecomposition:
    return eigendecompose(build_normalized_adjacency(g), driver=driver)


def perron_vector_check(g: Graph, d: SpectralDecomposition) -> float:
    expected = np.sqrt(g.degrees / (2.0 * g.edge_count))
    return float(np.abs(d.eigenvectors[0] - expected).max())


def spectral_gap(d: SpectralDecomposition) -> float:
    if d.n < 2:
        raise ValueError("spectral gap needs N >= 2")
    return 1.0 - d.lambda_star


def remainder_norm(g: Graph, p: float) -> float:
    """Max row sum of |R| where B = A/(Np) + R."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    d = _require_degrees(g)
    np_ = g.n * p
    src = np.repeat(np.arange(g.n), g.degrees)
    root = np.sqrt(d[src] * d[g.indices])
    r = np.abs(np_ - root) / (np_ * root)
    return float(np.bincount(src, weights=r, minlength=g.n).max())


def adjacency_spectrum(g: Graph, p: float | None = None, scaled: bool = True) -> AdjacencySpectrum:
    nu = np.linalg.eigvalsh(g.adjacency_matrix())[::-1].copy()
    mu = None
    if scaled:
        if p is None or not 0.0 < p < 1.0:
            raise DegenerateScaling(f"scaling by sqrt(Np(1-p)) needs 0 < p < 1, got {p}")
        mu = nu / np.sqrt(g.n * p * (1.0 - p))
    return AdjacencySpectrum(nu, mu)


def lambda2_relation(g: Graph, p: float, d: SpectralDecomposition | None = None,
                     nu: np.ndarray | None = None) -> Lambda2Relation:
    """Compare |lambda_2| with |nu_2|/(Np) + ||R||_inf on one graph.

    ``d`` and ``nu`` may be passed in to reuse decompositions already computed;
    without ``d`` only the eigenvalues of B are computed.
    """
    if d is None:
        lam2 = float(np.linalg.eigvalsh(build_normalized_adjacency(g))[-2])
    else:
        lam2 = d.lambda2
    if nu is None:
        nu = adjacency_spectrum(g, scaled=False).nu
    rem = remainder_norm(g, p)
    nu2 = abs(float(nu[1])) / (g.n * p)
    complete = g.edge_count == g.n * (g.n - 1) // 2
    return Lambda2Relation(abs(lam2), nu2 + rem, nu2, rem, complete)


def identity_residuals(g: Graph, d: SpectralDecomposition) -> dict:
    """Worst-case violations of the eigenvector identities used by the hitting formulas.

    Keys: ``orthogonal`` (scaled by sqrt(2|E|)), ``upto1_columns``,
    ``upto1_rows``, ``help1``, ``help2``, ``perron``, ``trace``.
    """
    v = d.eigenvectors
    lam = d.eigenvalues
    deg = g.degrees.astype(np.float64)
    two_e = 2.0 * g.edge_count
    pi = deg / two_e
    sq = v[1:] ** 2
    return {
        "orthogonal": float(np.abs(v[1:] @ np.sqrt(deg)).max() / np.sqrt(two_e)) if d.n > 1 else 0.0,
        "upto1_columns": float(np.abs((v**2).sum(axis=0) - 1.0).max()),
        "upto1_rows": float(np.abs((v**2).sum(axis=1) - 1.0).max()),
        "help1": float(np.abs(sq.sum(axis=0) - (1.0 - pi)).max()),
        "help2": float(np.abs(((1.0 - lam[1:])[:, None] * sq).sum(axis=0) - 1.0).max()),
        "perron": perron_vector_check(g, d),
        "trace": float(abs(lam.sum())),
    }
