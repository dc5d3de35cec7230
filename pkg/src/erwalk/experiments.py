"""Finite-n experiments on G(n, p): concentration checks and scaling sweeps."""
from __future__ import annotations

import csv
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields

import numpy as np

from erwalk._rng import derive_seed
from erwalk.errors import CRangeError, IsolatedVertex, ResampleLimitExceeded
from erwalk.graph import Graph, GnpParams, is_connected, sample_gnp
from erwalk.hitting import commute_time_matrix, random_start_time, random_target_times
from erwalk.spectral import adjacency_spectrum, decompose, lambda2_relation

GAP_ENVELOPE_CONSTANT = 3.0


# ---------------------------------------------------------------------------
# concentration of degrees and edge counts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DegreeCheck:
    lower_fail_rate: float
    upper_fail_rate: float
    bound_lower: float
    bound_upper: float
    observations: int

    @staticmethod
    def slack(bound: float, count: int) -> float:
        b = min(bound, 1.0)
        return 3.0 * math.sqrt(b * (1.0 - b) / count) + 1e-6

    @property
    def passed(self) -> bool:
        return (
            self.lower_fail_rate <= self.bound_lower + self.slack(self.bound_lower, self.observations)
            and self.upper_fail_rate <= self.bound_upper + self.slack(self.bound_upper, self.observations)
        )


@dataclass(frozen=True)
class EdgeCheck:
    fail_rate: float
    bound: float
    replicates: int

    @property
    def passed(self) -> bool:
        if self.bound >= 1.0:
            return True
        return self.fail_rate <= self.bound + 3.0 * math.sqrt(self.bound * (1.0 - self.bound) / self.replicates)


def degree_concentration_check(n: int, p: float, c: float, replicates: int, seed: int) -> DegreeCheck:
    """Per-vertex frequency of d_j <= Np - c sqrt(Np) and d_j >= Np + c sqrt(Np)."""
    mean = n * p
    if mean <= 0 or c <= 0:
        raise ValueError("need Np > 0 and c > 0")
    width = c * math.sqrt(mean)
    low = high = 0
    for r in range(replicates):
        deg = sample_gnp(GnpParams(n, p, derive_seed(seed, n, r))).degrees
        low += int(np.count_nonzero(deg <= mean - width))
        high += int(np.count_nonzero(deg >= mean + width))
    obs = replicates * n
    return DegreeCheck(
        lower_fail_rate=low / obs,
        upper_fail_rate=high / obs,
        bound_lower=math.exp(-c * c / 2.0),
        bound_upper=math.exp(-c * c / (2.0 * (1.0 + c / (3.0 * math.sqrt(mean))))),
        observations=obs,
    )


def edge_concentration_check(n: int, p: float, c: float, replicates: int, seed: int) -> EdgeCheck:
    """Frequency of |2|E| - n^2 p| >= c sqrt(n^2 p) over independent samples."""
    scale = math.sqrt(n * n * p)
    if not 0.0 < c <= scale:
        raise CRangeError(f"c must lie in (0, sqrt(n^2 p)] = (0, {scale:.6g}], got {c}")
    fails = 0
    for r in range(replicates):
        g = sample_gnp(GnpParams(n, p, derive_seed(seed, n, r)))
        if abs(2 * g.edge_count - n * n * p) >= c * scale:
            fails += 1
    return EdgeCheck(fails / replicates, 2.0 * math.exp(-c * c / 6.0), replicates)


def ratio_check(g: Graph) -> float:
    """max_j |(2|E| / d_j) / n - 1|."""
    deg = g.degrees
    zero = np.flatnonzero(deg == 0)
    if zero.size:
        raise IsolatedVertex(int(zero[0]))
    return float(np.abs(2.0 * g.edge_count / deg / g.n - 1.0).max())


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

_RULE_RE = re.compile(r"^(constant|threshold|polylog):([^:]+)$")


@dataclass(frozen=True)
class PRule:
    """Edge probability as a function of n.

    ``constant:p``, ``threshold:k`` (k log n / n) or ``polylog:b``
    ((log n)^b / n); the latter two are capped at 1.
    """

    name: str
    param: float

    @classmethod
    def parse(cls, text: str) -> "PRule":
        m = _RULE_RE.match(text.strip())
        if not m:
            raise ValueError(f"bad p-rule {text!r}; expected constant:P, threshold:K or polylog:B")
        try:
            param = float(m.group(2))
        except ValueError:
            raise ValueError(f"bad p-rule parameter {m.group(2)!r}") from None
        rule = cls(m.group(1), param)
        if rule.name == "constant" and not 0.0 <= param <= 1.0:
            raise ValueError("constant p must lie in [0, 1]")
        if rule.name != "constant" and param <= 0:
            raise ValueError(f"{rule.name} parameter must be positive")
        return rule

    def __call__(self, n: int) -> float:
        if self.name == "constant":
            return self.param
        if n < 2:
            return 1.0
        if self.name == "threshold":
            return min(1.0, self.param * math.log(n) / n)
        return min(1.0, math.log(n) ** self.param / n)

    def __str__(self):
        return f"{self.name}:{self.param:g}"


@dataclass(frozen=True)
class SweepPlan:
    n_grid: tuple
    p_rule: PRule
    replicates: int
    base_seed: int
    resample_limit: int = 100

    def __post_init__(self):
        grid = tuple(int(n) for n in self.n_grid)
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("n_grid must be non-empty and strictly increasing")
        if grid[0] < 1:
            raise ValueError("vertex counts must be >= 1")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.resample_limit < 0:
            raise ValueError("resample_limit must be >= 0")
        object.__setattr__(self, "n_grid", grid)


@dataclass(frozen=True)
class SweepRecord:
    n: int
    p: float
    seed: int
    replicate: int
    connected: bool
    edge_count: int
    min_degree: int
    max_degree: int
    ratio_max_dev: float
    lambda2_abs: float
    lambdaN_abs: float
    gap: float
    nu2_over_Np: float
    remainder_norm: float
    H_target_min: float
    H_target_mean: float
    H_target_max: float
    H_start_over_n: float
    resamples_used: int
    kappa_min_over_n: float
    kappa_max_over_n: float

    @property
    def H_target_max_dev(self) -> float:
        """max_j |H_j / n - 1|."""
        return max(abs(self.H_target_min - 1.0), abs(self.H_target_max - 1.0))


RECORD_FIELDS = tuple(f.name for f in fields(SweepRecord))


def graph_statistics(g: Graph, p: float) -> dict:
    """Every real-valued SweepRecord field for one connected graph."""
    n = g.n
    d = decompose(g)
    nu = adjacency_spectrum(g, scaled=False).nu
    rel = lambda2_relation(g, p, d, nu)
    H = random_target_times(g, d) / n
    kappa = commute_time_matrix(g, d) / n
    off = kappa[~np.eye(n, dtype=bool)]
    return dict(
        ratio_max_dev=ratio_check(g),
        lambda2_abs=abs(d.lambda2),
        lambdaN_abs=abs(d.lambdaN),
        gap=1.0 - d.lambda_star,
        nu2_over_Np=rel.nu2_over_Np,
        remainder_norm=rel.remainder,
        H_target_min=float(H.min()),
        H_target_mean=float(H.mean()),
        H_target_max=float(H.max()),
        H_start_over_n=random_start_time(d) / n,
        kappa_min_over_n=float(off.min()),
        kappa_max_over_n=float(off.max()),
    )


def _connected_sample(n, p, base_seed, replicate, resample_limit):
    for attempt in range(resample_limit + 1):
        seed = derive_seed(base_seed, n, replicate, attempt)
        g = sample_gnp(GnpParams(n, p, seed))
        if n >= 2 and is_connected(g):
            return g, seed, attempt
    raise ResampleLimitExceeded(n, replicate)


def _sweep_task(args) -> SweepRecord:
    n, p, base_seed, replicate, resample_limit = args
    try:
        g, seed, attempt = _connected_sample(n, p, base_seed, replicate, resample_limit)
    except ResampleLimitExceeded:
        nan = math.nan
        seed = derive_seed(base_seed, n, replicate, resample_limit)
        g = sample_gnp(GnpParams(n, p, seed))
        deg = g.degrees
        return SweepRecord(
            n, p, seed, replicate, False, g.edge_count, int(deg.min()), int(deg.max()),
            nan, nan, nan, nan, nan, nan, nan, nan, nan, nan, resample_limit, nan, nan,
        )
    deg = g.degrees
    stats = graph_statistics(g, p)
    return SweepRecord(
        n=n, p=p, seed=seed, replicate=replicate, connected=True,
        edge_count=g.edge_count, min_degree=int(deg.min()), max_degree=int(deg.max()),
        resamples_used=attempt, **stats,
    )


def run_sweep(plan: SweepPlan, workers: int = 1, progress=None) -> list[SweepRecord]:
    """One record per (n, replicate), ordered by n then replicate.

    ``progress`` is called with each finished record, in output order.
    """
    tasks = [
        (n, plan.p_rule(n), plan.base_seed, r, plan.resample_limit)
        for n in plan.n_grid
        for r in range(plan.replicates)
    ]
    records = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for rec in pool.map(_sweep_task, tasks):
                records.append(rec)
                if progress:
                    progress(rec)
    else:
        for task in tasks:
            rec = _sweep_task(task)
            records.append(rec)
            if progress:
                progress(rec)
    return records


def _format(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_csv(records, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(RECORD_FIELDS)
    for rec in records:
        writer.writerow([_format(v) for v in astuple(rec)])


def read_csv(fh) -> list[SweepRecord]:
    out = []
    types = {f.name: f.type for f in fields(SweepRecord)}
    for row in csv.DictReader(fh):
        values = {}
        for name in RECORD_FIELDS:
            t = types[name]
            raw = row[name]
            if t == "bool":
                values[name] = raw == "1"
            elif t == "int":
                values[name] = int(raw)
            else:
                values[name] = float(raw)
        out.append(SweepRecord(**values))
    return out


# ---------------------------------------------------------------------------
# trend summaries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GapTrendRow:
    n: int
    p: float
    median_lambda2_abs: float
    envelope: float
    passed: bool


@dataclass(frozen=True)
class GapTrend:
    rows: tuple
    vacuous: bool

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def gaps_by_n(self) -> dict:
        return {r.n: r.median_lambda2_abs for r in self.rows}


def gap_envelope(n: int, p: float, constant: float = GAP_ENVELOPE_CONSTANT) -> float:
    """constant * sqrt((1-p)/(np)), floored at 1/(n-1).

    No graph on n vertices has all non-Perron eigenvalues of B inside
    1/(n-1) (they sum to -1), so the floor keeps p = 1 rows meaningful.
    """
    env = constant * math.sqrt((1.0 - p) / (n * p)) if p > 0 else math.inf
    return max(env, 1.0 / (n - 1)) if n > 1 else env


def gap_trend_check(records, constant: float = GAP_ENVELOPE_CONSTANT) -> GapTrend:
    by_n = {}
    for rec in records:
        if rec.connected:
            by_n.setdefault(rec.n, []).append(rec)
    rows = []
    for n in sorted(by_n):
        recs = by_n[n]
        p = recs[0].p
        med = float(np.median([r.lambda2_abs for r in recs]))
        env = gap_envelope(n, p, constant)
        rows.append(GapTrendRow(n, p, med, env, med <= env))
    return GapTrend(tuple(rows), vacuous=not rows)


def median_by_n(records, key) -> dict:
    """Median of ``key(record)`` over connected records, per n."""
    by_n = {}
    for rec in records:
        if rec.connected:
            by_n.setdefault(rec.n, []).append(key(rec))
    return {n: float(np.median(v)) for n, v in sorted(by_n.items())}


def strictly_decreasing(values) -> bool:
    values = list(values)
    return all(b < a for a, b in zip(values, values[1:]))
