"""Deterministic seed derivation for reproducible, parallelism-invariant runs.

Two PRNG families are used and pinned:

* ``splitmix64`` -- stateless 64-bit avalanche mixing for seed derivation and
  for the in-kernel choice stream of the uniform proposer.  ``mix(seed, k)``
  finalizes ``seed + (k+1) * 0x9E3779B97F4A7C15 (mod 2^64)``; the finalizer is
  bijective, so distinct ``k`` always yield distinct seeds.
* numpy's PCG64 (``np.random.Generator``) -- per-game decider/proposer streams
  and Coins-and-Buckets trial streams, seeded with a single 64-bit integer.

Bounded integer draws from the splitmix stream use rejection sampling
(``draw % bound`` accepted only below the largest multiple of ``bound``),
so choices are exactly uniform.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def splitmix64(x: int) -> int:
    """The splitmix64 output (avalanche) function on a 64-bit state."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * _MIX1) & _MASK64
    x = ((x ^ (x >> 27)) * _MIX2) & _MASK64
    return x ^ (x >> 31)


def mix(seed: int, k: int) -> int:
    """Derive a 64-bit child seed from ``seed`` and an index ``k``.

    Stateless; injective in ``k`` for fixed ``seed`` (k in [0, 2^64)).
    """
    return splitmix64((seed + ((k + 1) * _GOLDEN)) & _MASK64)


def derive(seed: int, *tags: int) -> int:
    """Chain :func:`mix` over a sequence of integer tags."""
    s = seed & _MASK64
    for t in tags:
        s = mix(s, t)
    return s


# Role tags for per-game policy streams.
ROLE_PROPOSER = 1
ROLE_DECIDER = 2


def generator(seed: int) -> np.random.Generator:
    """A PCG64 generator seeded with a 64-bit integer."""
    return np.random.Generator(np.random.PCG64(seed & _MASK64))


class SplitMix64Stream:
    """Sequential splitmix64 stream with exact bounded draws.

    Mirrors the in-kernel implementation bit for bit: ``next_u64`` advances the
    state by the golden-ratio increment and finalizes it; ``bounded(n)`` draws
    until the raw value falls below the largest multiple of ``n``.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK64
        return splitmix64(self.state)

    def bounded(self, n: int) -> int:
        if n <= 0:
            raise ValueError("bound must be positive")
        # accept draws at or above (2^64 - n) mod n: exactly a multiple of n
        # values remain, so the residue is uniform (same rule as the kernels)
        threshold = ((1 << 64) - n) % n
        while True:
            r = self.next_u64()
            if r >= threshold:
                return r % n


class SeedStream:
    """Per-trial seed derivation: ``trial_seed = mix(master_seed, trial_index)``."""

    __slots__ = ("master_seed",)

    def __init__(self, master_seed: int):
        self.master_seed = master_seed & _MASK64

    def trial_seed(self, trial_index: int) -> int:
        return mix(self.master_seed, trial_index)

    def cell_stream(self, cell_index: int) -> "SeedStream":
        """Independent sub-stream for one sweep cell."""
        return SeedStream(mix(self.master_seed, cell_index))
