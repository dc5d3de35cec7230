"""Counter-based random streams.

Every random quantity in the package is drawn from a Philox-4x64-10
generator whose 128-bit key is ``(seed, stream)``.  Stream 0 of a seed
drives graph sampling; walk sample ``s`` uses stream ``s + 1``.  Streams
are therefore independent of how work is split across processes.
"""
from __future__ import annotations

import numpy as np
from numpy.random import Philox, SeedSequence

MASK64 = (1 << 64) - 1
GRAPH_STREAM = 0


def stream_key(seed: int, stream: int) -> int:
    return (int(seed) & MASK64) | ((int(stream) & MASK64) << 64)


def bit_generator(seed: int, stream: int) -> Philox:
    return Philox(key=stream_key(seed, stream))


def walk_stream(sample: int) -> int:
    return sample + 1


def derive_seed(*words: int) -> int:
    """Hash integer words into one 64-bit seed (order sensitive)."""
    state = SeedSequence([int(w) & MASK64 for w in words]).generate_state(1, np.uint64)
    return int(state[0])
