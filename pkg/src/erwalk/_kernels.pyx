# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops.  Must stay bit-for-bit equivalent to _fallback.py."""
import numpy as np
cimport numpy as cnp
from libc.math cimport log, floor
from libc.stdint cimport uint64_t, int64_t

from erwalk._rng import GRAPH_STREAM

cnp.import_array()

cdef extern from *:
    """
    typedef unsigned __int128 erwalk_u128;
    """
    ctypedef unsigned long long erwalk_u128

cdef double TWO_M53 = 1.0 / 9007199254740992.0

# Philox-4x64-10, emitting the same sequence as numpy.random.Philox
cdef uint64_t PHILOX_M0 = 0xD2E7470EE14C6C93ULL
cdef uint64_t PHILOX_M1 = 0xCA5A826395121157ULL
cdef uint64_t PHILOX_W0 = 0x9E3779B97F4A7C15ULL
cdef uint64_t PHILOX_W1 = 0xBB67AE8584CAA73BULL


cdef struct philox_t:
    uint64_t ctr[4]
    uint64_t key[2]
    uint64_t buf[4]
    int pos


cdef inline void philox_init(philox_t *st, uint64_t seed, uint64_t stream) noexcept nogil:
    st.ctr[0] = 0
    st.ctr[1] = 0
    st.ctr[2] = 0
    st.ctr[3] = 0
    st.key[0] = seed
    st.key[1] = stream
    st.pos = 4


cdef inline void philox_block(philox_t *st) noexcept nogil:
    cdef uint64_t c0 = st.ctr[0], c1 = st.ctr[1], c2 = st.ctr[2], c3 = st.ctr[3]
    cdef uint64_t k0 = st.key[0], k1 = st.key[1]
    cdef erwalk_u128 p0, p1
    cdef int r
    for r in range(10):
        if r > 0:
            k0 += PHILOX_W0
            k1 += PHILOX_W1
        p0 = <erwalk_u128>PHILOX_M0 * <erwalk_u128>c0
        p1 = <erwalk_u128>PHILOX_M1 * <erwalk_u128>c2
        c0 = (<uint64_t>(p1 >> 64)) ^ c1 ^ k0
        c1 = <uint64_t>p1
        c2 = (<uint64_t>(p0 >> 64)) ^ c3 ^ k1
        c3 = <uint64_t>p0
    st.buf[0] = c0
    st.buf[1] = c1
    st.buf[2] = c2
    st.buf[3] = c3


cdef inline uint64_t philox_next(philox_t *st) noexcept nogil:
    cdef int i
    if st.pos < 4:
        st.pos += 1
        return st.buf[st.pos - 1]
    # counter is bumped before each block, with carry
    for i in range(4):
        st.ctr[i] += 1
        if st.ctr[i] != 0:
            break
    philox_block(st)
    st.pos = 1
    return st.buf[0]


cdef inline double unit(philox_t *rng) noexcept nogil:
    return <double>(philox_next(rng) >> 11) * TWO_M53


cdef inline int64_t pick(philox_t *rng, int64_t deg) noexcept nogil:
    return <int64_t>(((philox_next(rng) >> 32) * <uint64_t>deg) >> 32)


def philox_raw(uint64_t seed, uint64_t stream, int64_t count):
    """Raw 64-bit outputs of stream ``(seed, stream)``; for known-answer tests."""
    cdef philox_t st
    philox_init(&st, seed, stream)
    out = np.empty(count, dtype=np.uint64)
    cdef uint64_t[::1] view = out
    cdef int64_t i
    for i in range(count):
        view[i] = philox_next(&st)
    return out


cdef class _EdgeBuffer:
    cdef public object rows, cols
    cdef int64_t size

    def __init__(self, int64_t capacity):
        self.rows = np.empty(max(capacity, 16), dtype=np.int64)
        self.cols = np.empty(max(capacity, 16), dtype=np.int64)
        self.size = 0

    cdef void grow(self):
        cap = 2 * self.rows.shape[0]
        self.rows = np.resize(self.rows, cap)
        self.cols = np.resize(self.cols, cap)

    def result(self):
        return self.rows[: self.size].copy(), self.cols[: self.size].copy()


def gnp_dense(uint64_t seed, int64_t n, double p):
    """One Bernoulli(p) draw per pair, pairs in lexicographic order."""
    cdef philox_t st
    cdef philox_t *rng = &st
    philox_init(rng, seed, GRAPH_STREAM)
    cdef int64_t i, j, k = 0
    cdef double npairs = 0.5 * n * (n - 1)
    cdef _EdgeBuffer buf = _EdgeBuffer(<int64_t>(npairs * p + 6.0 * (npairs * p) ** 0.5 + 16))
    cdef int64_t[::1] rows = buf.rows
    cdef int64_t[::1] cols = buf.cols
    for i in range(n - 1):
        for j in range(i + 1, n):
            if unit(rng) < p:
                if k == rows.shape[0]:
                    buf.size = k
                    buf.grow()
                    rows = buf.rows
                    cols = buf.cols
                rows[k] = i
                cols[k] = j
                k += 1
    buf.size = k
    return buf.result()


def gnp_skip(uint64_t seed, int64_t n, double p):
    """Geometric skip-length sampling; requires 0 < p < 1."""
    cdef philox_t st
    cdef philox_t *rng = &st
    philox_init(rng, seed, GRAPH_STREAM)
    cdef double log_q = log(1.0 - p)
    cdef int64_t npairs = n * (n - 1) // 2
    cdef int64_t pos = -1, i = 0, row_end = n - 1, k = 0
    cdef double skip
    cdef _EdgeBuffer buf = _EdgeBuffer(<int64_t>(npairs * p + 6.0 * (npairs * p) ** 0.5 + 16))
    cdef int64_t[::1] rows = buf.rows
    cdef int64_t[::1] cols = buf.cols
    while True:
        skip = floor(log(1.0 - unit(rng)) / log_q)
        if skip >= <double>(npairs - pos):
            break
        pos += <int64_t>skip + 1
        if pos >= npairs:
            break
        # row_end is the flat index one past the last pair of row i
        while pos >= row_end:
            i += 1
            row_end += n - 1 - i
        if k == rows.shape[0]:
            buf.size = k
            buf.grow()
            rows = buf.rows
            cols = buf.cols
        rows[k] = i
        cols[k] = n - (row_end - pos)
        k += 1
    buf.size = k
    return buf.result()


def walk_hits(indptr, indices, int64_t source, int64_t target,
              uint64_t seed, int64_t start, int64_t stop, int64_t max_steps):
    """First-passage step counts for walk samples ``start .. stop-1``.

    Walks still away from ``target`` after ``max_steps`` steps report
    ``max_steps + 1``; the caller clips and flags them.
    """
    cdef const int64_t[::1] ptr = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const int64_t[::1] nbr = np.ascontiguousarray(indices, dtype=np.int64)
    out = np.empty(stop - start, dtype=np.int64)
    cdef int64_t[::1] hits = out
    cdef int64_t s, x, steps, lo
    cdef philox_t st
    cdef philox_t *rng = &st
    with nogil:
        for s in range(start, stop):
            # stream s + 1, matching erwalk._rng.walk_stream
            philox_init(rng, seed, <uint64_t>(s + 1))
            x = source
            steps = 0
            while steps < max_steps:
                lo = ptr[x]
                x = nbr[lo + pick(rng, ptr[x + 1] - lo)]
                steps += 1
                if x == target:
                    break
            if x != target:
                steps = max_steps + 1
            hits[s - start] = steps
    return out
