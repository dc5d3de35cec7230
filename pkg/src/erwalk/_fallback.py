"""Pure numpy implementation of the kernels in ``_kernels.pyx``.

Outputs are identical to the compiled versions: the same Philox streams are
consumed in the same order and the same integer/float conversions are used.
"""
from __future__ import annotations

import math

import numpy as np

from erwalk._rng import GRAPH_STREAM, bit_generator, walk_stream

TWO_M53 = 2.0**-53
_U11 = np.uint64(11)
_U32 = np.uint64(32)


def _units(raw: np.ndarray) -> np.ndarray:
    return (raw >> _U11).astype(np.float64) * TWO_M53


def gnp_dense(seed, n, p):
    bg = bit_generator(seed, GRAPH_STREAM)
    rows, cols = [], []
    for i in range(n - 1):
        hit = np.flatnonzero(_units(bg.random_raw(n - 1 - i)) < p)
        rows.append(np.full(hit.size, i, dtype=np.int64))
        cols.append(hit.astype(np.int64) + i + 1)
    if not rows:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    return np.concatenate(rows), np.concatenate(cols)


def gnp_skip(seed, n, p):
    bg = bit_generator(seed, GRAPH_STREAM)
    log_q = math.log(1.0 - p)
    npairs = n * (n - 1) // 2
    pos, i, row_end = -1, 0, n - 1
    rows, cols = [], []
    while True:
        u = (int(bg.random_raw()) >> 11) * TWO_M53
        skip = math.floor(math.log(1.0 - u) / log_q)
        if skip >= npairs - pos:
            break
        pos += skip + 1
        if pos >= npairs:
            break
        while pos >= row_end:
            i += 1
            row_end += n - 1 - i
        rows.append(i)
        cols.append(n - (row_end - pos))
    return np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64)


def walk_hits(indptr, indices, source, target, seed, start, stop, max_steps, block=32):
    """Advance all samples in lockstep, refilling per-sample random blocks."""
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    count = stop - start
    gens = [bit_generator(seed, walk_stream(s)) for s in range(start, stop)]
    hits = np.full(count, max_steps + 1, dtype=np.int64)
    pos = np.full(count, source, dtype=np.int64)
    active = np.arange(count)
    steps = 0
    while active.size and steps < max_steps:
        width = min(block, max_steps - steps)
        raw = np.stack([gens[a].random_raw(width) for a in active])
        for c in range(width):
            x = pos[active]
            lo = indptr[x]
            deg = (indptr[x + 1] - lo).astype(np.uint64)
            choice = (((raw[:, c] >> _U32) * deg) >> _U32).astype(np.int64)
            x = indices[lo + choice]
            pos[active] = x
            steps += 1
            done = x == target
            if done.any():
                hits[active[done]] = steps
                # a finished walk's unused draws are simply discarded
                keep = ~done
                active = active[keep]
                raw = raw[keep]
                if not active.size:
                    break
    return hits
