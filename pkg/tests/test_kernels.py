"""Compiled and numpy kernels must agree bit for bit."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from erwalk import kernels
from erwalk._rng import bit_generator, derive_seed, stream_key
from erwalk.graph import Graph, complete_graph, cycle_graph, path_graph

BACKENDS = kernels.available_backends()
needs_ext = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled kernels not built")

seeds = st.integers(0, 2**64 - 1)


def test_backend_is_selected():
    assert kernels.BACKEND in BACKENDS


def test_stream_key_layout():
    assert stream_key(5, 3) == 5 | (3 << 64)
    assert bit_generator(5, 3).state["state"]["key"].tolist() == [5, 3]


def test_derive_seed_is_order_sensitive():
    assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3)
    assert derive_seed(1, 2, 3) != derive_seed(3, 2, 1)


@needs_ext
@given(seed=seeds, stream=seeds)
@settings(max_examples=50, deadline=None)
def test_compiled_philox_matches_numpy(seed, stream):
    ours = BACKENDS["cython"].philox_raw(seed, stream, 9)
    assert np.array_equal(ours, bit_generator(seed, stream).random_raw(9))


@needs_ext
def test_compiled_philox_long_stream():
    ours = BACKENDS["cython"].philox_raw(2**64 - 1, 7, 5003)
    assert np.array_equal(ours, bit_generator(2**64 - 1, 7).random_raw(5003))


@needs_ext
@given(seed=seeds, n=st.integers(2, 60), p=st.floats(0.001, 0.999))
@settings(max_examples=60, deadline=None)
def test_gnp_backends_agree(seed, n, p):
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    for name in ("gnp_dense", "gnp_skip"):
        a = getattr(py, name)(seed, n, p)
        b = getattr(cy, name)(seed, n, p)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


@pytest.mark.parametrize("backend", sorted(BACKENDS))
def test_gnp_edges_are_lexicographic(backend):
    for name in ("gnp_dense", "gnp_skip"):
        rows, cols = getattr(BACKENDS[backend], name)(11, 80, 0.1)
        assert np.all(rows < cols)
        keys = rows * 80 + cols
        assert np.all(np.diff(keys) > 0)


@pytest.mark.parametrize("backend", sorted(BACKENDS))
def test_skip_sampling_density(backend):
    n, p = 600, 0.02
    rows, _ = BACKENDS[backend].gnp_skip(3, n, p)
    pairs = n * (n - 1) / 2
    assert abs(rows.size - pairs * p) < 5 * np.sqrt(pairs * p * (1 - p))


@needs_ext
@pytest.mark.parametrize("graph", [complete_graph(5), path_graph(6), cycle_graph(7)], ids=repr)
def test_walk_backends_agree(graph):
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    args = (graph.indptr, graph.indices, 0, graph.n - 1, 99)
    a = py.walk_hits(*args, 0, 3000, 500)
    b = cy.walk_hits(*args, 0, 3000, 500)
    assert np.array_equal(a, b)
    # truncation marker
    a = py.walk_hits(*args, 10, 400, 3)
    b = cy.walk_hits(*args, 10, 400, 3)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("backend", sorted(BACKENDS))
def test_walk_chunks_compose(backend):
    g = cycle_graph(6)
    walk = BACKENDS[backend].walk_hits
    whole = walk(g.indptr, g.indices, 0, 3, 5, 0, 500, 10_000)
    parts = np.concatenate([
        walk(g.indptr, g.indices, 0, 3, 5, a, b, 10_000) for a, b in [(0, 17), (17, 300), (300, 500)]
    ])
    assert np.array_equal(whole, parts)


@pytest.mark.parametrize("backend", sorted(BACKENDS))
def test_walk_k2_is_one_step(backend):
    g = complete_graph(2)
    hits = BACKENDS[backend].walk_hits(g.indptr, g.indices, 0, 1, 0, 0, 50, 10)
    assert np.all(hits == 1)


def test_walk_on_star_counts_first_arrival():
    # from the centre every step lands on a leaf; target leaf is hit w.p. 1/3 per visit pair
    g = Graph.from_edges(4, [0, 0, 0], [1, 2, 3])
    for impl in BACKENDS.values():
        hits = impl.walk_hits(g.indptr, g.indices, 0, 1, derive_seed(4), 0, 2000, 10_000)
        assert np.all(hits % 2 == 1)
