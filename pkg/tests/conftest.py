"""Shared test oracles: brute-force solvers kept independent of the paths
they check, plus the pinned parameter points for the bound calculators."""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from rpslab.analysis import GraphView

# 20 pinned points for the tail-bound calculators (8 + 6 + 6), each checked
# against 50-digit mpmath evaluation of the same formula.
BUCKET_POINTS = [
    (1, 2, 1, Fraction(2, 5)),
    (5, 100, 40, Fraction(1, 25)),
    (5, 100, 100, Fraction(1, 21)),
    (50, 400, 200, Fraction(1, 10)),
    (500, 1000, 1000, Fraction(49, 100)),
    (200, 400, 380, Fraction(9, 20)),
    (7, 50, 25, Fraction(1, 8)),
    (12, 144, 144, Fraction(1, 13)),
]
SIMPLE_POINTS = [
    (1, 1, 1, Fraction(1, 2)),
    (2, 6, 4, Fraction(1, 4)),
    (10, 30, 20, Fraction(1, 5)),
    (50, 50, 80, Fraction(9, 10)),
    (100, 300, 399, Fraction(1, 4)),
    (3, 97, 60, Fraction(1, 40)),
]
BOHMAN_POINTS = [
    (1.0, 10.0, 30, 15.0),
    (0.5, 5.0, 100, 40.0),
    (0.1, 1.0, 1000, 99.0),
    (1.0, 25.0, 8, 7.5),
    (2.0, 40.0, 64, 100.0),
    (0.25, 2.5, 12, 2.9),
]


def check_bounds_against_mpmath(rel_tol=1e-12):
    """Compare all 20 pinned points against high-precision evaluation.

    Returns the number of points checked; raises AssertionError on any
    relative error above ``rel_tol``.
    """
    import mpmath

    from rpslab.coins import (
        CBParams,
        tail_bound_bohman,
        tail_bound_bucket,
        tail_bound_simple,
    )

    checked = 0
    with mpmath.workdps(50):
        for a, nu, nu0, t in BUCKET_POINTS:
            got = tail_bound_bucket(CBParams(a, nu, nu0), t).raw
            tf = mpmath.mpf(t.numerator) / t.denominator
            ref = (80 * mpmath.sqrt(nu) / tf**2) * mpmath.exp(
                -mpmath.mpf(nu0) * nu * tf**2 / (20 * a)
            )
            assert abs(got - float(ref)) <= rel_tol * float(ref), (a, nu, nu0, t)
            checked += 1
        for a, b, nu0, t in SIMPLE_POINTS:
            got = tail_bound_simple(a, b, nu0, t).raw
            tf = mpmath.mpf(t.numerator) / t.denominator
            ref = (40 / tf**2) * mpmath.exp(
                -mpmath.mpf(nu0) * (a + b) * tf**2 / (20 * a)
            )
            assert abs(got - float(ref)) <= rel_tol * float(ref), (a, b, nu0, t)
            checked += 1
        for c1, c2, m, lam in BOHMAN_POINTS:
            got = tail_bound_bohman(c1, c2, m, lam).raw
            ref = 2 * mpmath.exp(-mpmath.mpf(lam) ** 2 / (3 * mpmath.mpf(c1) * c2 * m))
            assert abs(got - float(ref)) <= rel_tol * float(ref), (c1, c2, m, lam)
            checked += 1
    return checked


def brute_force_mis(g: GraphView) -> int:
    """Maximum independent set by subset enumeration (n <= 20)."""
    assert g.n <= 20
    rows = g.bit_rows()
    best = 0
    for mask in range(1 << g.n):
        if mask.bit_count() <= best:
            continue
        ok = True
        m = mask
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            if rows[v] & mask:
                ok = False
                break
        if ok:
            best = mask.bit_count()
    return best


def recompute_status(state) -> np.ndarray:
    """Pair statuses from first principles: edges from adjacency, closed =
    non-edge with a common neighbor, open otherwise."""
    from rpslab import pairs as _p

    n = state.n
    adj = [set(state.neighbors(v).tolist()) for v in range(n)]
    out = np.zeros(_p.num_pairs(n), dtype=np.uint8)
    for u in range(n):
        for v in range(u + 1, n):
            k = _p.pair_index(n, u, v)
            if v in adj[u]:
                out[k] = 1
            elif adj[u] & adj[v]:
                out[k] = 2
    return out


def random_graph(n: int, p: float, seed: int) -> GraphView:
    rng = np.random.default_rng(seed)
    edges = [
        (u, v)
        for u in range(n)
        for v in range(u + 1, n)
        if rng.random() < p
    ]
    return GraphView.from_edges(n, edges)


def petersen() -> GraphView:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    return GraphView.from_edges(10, outer + inner + spokes)


@pytest.fixture
def petersen_graph():
    return petersen()
