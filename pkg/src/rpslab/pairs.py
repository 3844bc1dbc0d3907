"""Canonical vertex-pair indexing.

A pair is an unordered ``{u, v}`` with ``u != v``, stored canonically as
``(u, v)`` with ``u < v``.  Pairs map to a flat index in the row-major upper
triangle:

    index(u, v) = u*(2n - u - 1)//2 + (v - u - 1)

which lets per-pair state live in flat numpy arrays.  ``n`` is capped at
2^15 so indices stay below 2^29 and fit comfortably in int32.
"""

from __future__ import annotations

import math

import numpy as np

MAX_N = 1 << 15

Pair = tuple[int, int]


def canonical(u: int, v: int) -> Pair:
    """Return ``{u, v}`` as (min, max); reject degenerate pairs."""
    if u == v:
        raise ValueError(f"degenerate pair ({u}, {v})")
    return (u, v) if u < v else (v, u)


def check_pair(n: int, u: int, v: int) -> Pair:
    """Canonicalize and range-check a pair against vertex count ``n``."""
    u, v = canonical(u, v)
    if u < 0 or v >= n:
        raise ValueError(f"pair ({u}, {v}) out of range for n={n}")
    return (u, v)


def num_pairs(n: int) -> int:
    return n * (n - 1) // 2


def pair_index(n: int, u: int, v: int) -> int:
    """Flat index of canonical pair (u, v), u < v."""
    return u * (2 * n - u - 1) // 2 + (v - u - 1)


def row_base(n: int, u: int) -> int:
    """Index of pair (u, u+1), the first pair in row u."""
    return u * (2 * n - u - 1) // 2


def pair_from_index(n: int, k: int) -> Pair:
    """Inverse of :func:`pair_index` (scalar)."""
    b = 2 * n - 1
    u = int((b - math.sqrt(b * b - 8 * k)) / 2)
    # float rounding can be off by one either way
    while row_base(n, u + 1) <= k:
        u += 1
    while row_base(n, u) > k:
        u -= 1
    v = k - row_base(n, u) + u + 1
    return (u, v)


def pair_index_arr(n: int, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Vectorized :func:`pair_index` for canonical arrays (u < v elementwise)."""
    u = u.astype(np.int64)
    return u * (2 * n - u - 1) // 2 + (v - u - 1)


def pairs_from_index_arr(n: int, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized inverse mapping; returns (u, v) int64 arrays."""
    k = k.astype(np.int64)
    b = 2 * n - 1
    u = ((b - np.sqrt(b * b - 8.0 * k)) / 2).astype(np.int64)
    base = u * (2 * n - u - 1) // 2
    # fix up float rounding: u too small or too large by at most one step
    over = base > k
    while over.any():
        u[over] -= 1
        base = u * (2 * n - u - 1) // 2
        over = base > k
    nxt = (u + 1) * (2 * n - u - 2) // 2
    under = nxt <= k
    while under.any():
        u[under] += 1
        nxt = (u + 1) * (2 * n - u - 2) // 2
        under = nxt <= k
    base = u * (2 * n - u - 1) // 2
    v = k - base + u + 1
    return u, v
