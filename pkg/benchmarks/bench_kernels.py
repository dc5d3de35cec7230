"""Compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each row reports the best wall time over the repeats and checks that both
backends return identical arrays.
"""
import argparse
import time

import numpy as np

from erwalk import kernels
from erwalk.graph import GnpParams, cycle_graph, sample_gnp


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases():
    ring = cycle_graph(30)
    dense = sample_gnp(GnpParams(200, 0.05, 1))
    yield "gnp_dense n=2000 p=0.05", lambda k: k.gnp_dense(1, 2000, 0.05)
    yield "gnp_skip n=20000 p=0.0005", lambda k: k.gnp_skip(1, 20000, 0.0005)
    yield "walk_hits C30 0->15 x20000", lambda k: k.walk_hits(ring.indptr, ring.indices, 0, 15, 7, 0, 20000, 10**6)
    yield "walk_hits G(200,0.05) x20000", lambda k: k.walk_hits(dense.indptr, dense.indices, 0, 199, 7, 0, 20000, 10**7)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled kernels are not built; only the fallback is available")
    print(f"{'case':32s} " + " ".join(f"{b:>10s}" for b in sorted(backends)) + "   speedup  same")
    for name, fn in cases():
        times, outs = {}, {}
        for b in sorted(backends):
            times[b], outs[b] = best_of(lambda: fn(backends[b]), args.repeat)
        ref = outs["python"]
        same = all(
            all(np.array_equal(x, y) for x, y in zip(o, ref)) if isinstance(o, tuple) else np.array_equal(o, ref)
            for o in outs.values()
        )
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{name:32s} " + " ".join(f"{times[b]:9.4f}s" for b in sorted(times)) + f"  {speed:7.1f}x  {same}")


if __name__ == "__main__":
    main()
