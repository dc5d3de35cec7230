"""Simple undirected graphs and the G(n, p) sampler."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse
from scipy.sparse.csgraph import breadth_first_order

from erwalk import kernels
from erwalk.errors import DuplicateEdge, EmptyGraph, ParseError, RangeError, SelfLoop

DENSE_SAMPLING_MAX_N = 4096


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple graph in CSR form.

    ``indices[indptr[i]:indptr[i+1]]`` are the neighbours of ``i`` in
    increasing order.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray

    def __post_init__(self):
        for arr in (self.indptr, self.indices):
            arr.setflags(write=False)

    @classmethod
    def from_edges(cls, n, rows, cols):
        """Build from pairs, which must be distinct, loop-free and in range."""
        if n < 1:
            raise ValueError("n must be >= 1")
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        if rows.shape != cols.shape:
            raise ValueError("rows and cols differ in length")
        if rows.size:
            if min(rows.min(), cols.min()) < 0 or max(rows.max(), cols.max()) >= n:
                raise RangeError(f"vertex id out of range for n={n}")
            if np.any(rows == cols):
                raise SelfLoop("self-loops are not allowed")
        lo, hi = np.minimum(rows, cols), np.maximum(rows, cols)
        keys = lo * n + hi
        if np.unique(keys).size != keys.size:
            raise DuplicateEdge("duplicate edge")
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        counts = np.bincount(src, minlength=n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return cls(int(n), indptr, dst[order].astype(np.int64))

    @classmethod
    def _from_sorted_pairs(cls, n, rows, cols):
        """Trusted constructor for distinct ``i < j`` pairs in lexicographic order."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        # lower neighbours first, then upper: a stable sort on the source keeps both runs sorted
        src = np.concatenate([cols, rows])
        dst = np.concatenate([rows, cols])
        order = np.argsort(src, kind="stable")
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(int(n), indptr, dst[order])

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def edge_count(self) -> int:
        return int(self.indices.size // 2)

    @property
    def adjacency(self):
        return tuple(tuple(int(v) for v in self.neighbors(i)) for i in range(self.n))

    def neighbors(self, i) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def edges(self):
        """Edges ``(i, j)`` with ``i < j`` in lexicographic order."""
        src = np.repeat(np.arange(self.n), self.degrees)
        mask = src < self.indices
        return src[mask], self.indices[mask]

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        src = np.repeat(np.arange(self.n), self.degrees)
        a[src, self.indices] = 1.0
        return a

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    __hash__ = None

    def __repr__(self):
        return f"Graph(n={self.n}, edge_count={self.edge_count})"


@dataclass(frozen=True)
class GnpParams:
    n: int
    p: float
    seed: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def sample_gnp(params: GnpParams) -> Graph:
    n, p = params.n, float(params.p)
    if n < 2 or p == 0.0:
        rows = cols = np.empty(0, dtype=np.int64)
    elif p == 1.0:
        rows, cols = np.triu_indices(n, 1)
    elif n <= DENSE_SAMPLING_MAX_N:
        rows, cols = kernels.gnp_dense(params.seed, n, p)
    else:
        rows, cols = kernels.gnp_skip(params.seed, n, p)
    return Graph._from_sorted_pairs(n, rows, cols)


def to_sparse(g: Graph) -> scipy.sparse.csr_matrix:
    data = np.ones(g.indices.size)
    return scipy.sparse.csr_matrix((data, g.indices, g.indptr), shape=(g.n, g.n))


def is_connected(g: Graph) -> bool:
    """Breadth-first search from vertex 0 reaches every vertex."""
    order = breadth_first_order(to_sparse(g), 0, directed=False, return_predecessors=False)
    return order.size == g.n


def stationary_distribution(g: Graph) -> np.ndarray:
    if g.edge_count == 0:
        raise EmptyGraph("stationary distribution needs at least one edge")
    return g.degrees / (2.0 * g.edge_count)


def read_edge_list(text: str) -> Graph:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ParseError("missing header line 'n <count>'")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "n":
        raise ParseError(f"bad header: {lines[0]!r}")
    try:
        n = int(head[1])
    except ValueError:
        raise ParseError(f"bad vertex count: {head[1]!r}") from None
    if n < 1:
        raise ParseError("vertex count must be >= 1")
    rows, cols = [], []
    seen = set()
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'i j', got {line!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer vertex id in {line!r}") from None
        if i < 0 or j < 0 or i >= n or j >= n:
            raise RangeError(f"line {lineno}: vertex id out of range [0, {n})")
        if i == j:
            raise SelfLoop(f"line {lineno}: self-loop at vertex {i}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise DuplicateEdge(f"line {lineno}: duplicate edge {key}")
        seen.add(key)
        rows.append(i)
        cols.append(j)
    return Graph.from_edges(n, rows, cols)


def write_edge_list(g: Graph) -> str:
    rows, cols = g.edges()
    out = [f"n {g.n}"]
    out.extend(f"{i} {j}" for i, j in zip(rows.tolist(), cols.tolist()))
    return "\n".join(out)


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, *np.triu_indices(n, 1))


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, np.arange(n - 1), np.arange(1, n))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a simple cycle needs n >= 3")
    return Graph.from_edges(n, np.arange(n), (np.arange(n) + 1) % n)


def empty_graph(n: int) -> Graph:
    return Graph.from_edges(n, [], [])
