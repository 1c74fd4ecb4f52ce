"""Stable seed derivation.

Every random stream in a run is keyed by a tuple of integers, e.g.
``(master_seed, STREAM_EVAL, generation, slot)``. Keys are folded through
SplitMix64 so the mapping is identical on every platform and does not
depend on a shared mutable generator.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

# Stream tags, kept distinct so substreams never collide.
STREAM_INIT = 1
STREAM_BREED = 2
STREAM_EVAL = 3
STREAM_COURSE = 4
STREAM_REPLICATION = 5


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(*parts: int) -> int:
    """Fold integer ``parts`` into one 64-bit seed.

    Order matters: ``derive_seed(1, 2) != derive_seed(2, 1)``. Negative
    values are reduced modulo 2**64.
    """
    h = 0x6A09E667F3BCC908
    for p in parts:
        h = splitmix64(h ^ (int(p) & MASK64))
    return h


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & MASK64))
