"""The Coins-and-Buckets auxiliary game and its concentration bounds.

One game: ``nu`` coins are placed one per step into bucket A (capacity
``a``) or bucket B.  Before each placement an adversary picks heads or
tails, seeing only where earlier coins landed.  In ``exact_subset`` mode a
uniformly random a-subset of the steps feeds bucket A; in ``independent``
mode each step lands in A with probability a/nu independently.  With ``h``
total heads and ``h_A`` heads in A, the adversary's score is
``|h_A - a*h/nu|``, forfeited to zero when ``h < nu0``.

Scores and the two-point variable X_{a,b} (+1/a w.p. a/(a+b), else -1/b)
are exact rationals so equality assertions in tests are exact; only the
tail-bound evaluations use floats.  Bounds above 1 are reported both raw
and clamped -- at desk scale the ``80*sqrt(nu)/t^2`` prefactor usually
dominates and a clamped bound of 1 is vacuous, which the test suite treats
accordingly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .seeding import generator, mix

EXACT_SUBSET = "exact_subset"
INDEPENDENT = "independent"

WILSON_Z = 1.959963984540054  # two-sided 95% normal quantile

Rational = Union[int, float, Fraction]


@dataclass(frozen=True)
class CBParams:
    """Game parameters: bucket-A capacity, total coins, forfeit threshold."""

    a: int
    nu: int
    nu0: int

    def __post_init__(self):
        if self.a < 1 or self.nu < 1 or self.nu0 < 1:
            raise ValueError("a, nu, nu0 must be positive integers")
        if 2 * self.a > self.nu:
            raise ValueError(f"a={self.a} must satisfy a <= nu/2 (nu={self.nu})")
        if self.nu0 > self.nu:
            raise ValueError(f"nu0={self.nu0} must not exceed nu={self.nu}")

    @property
    def b(self) -> int:
        return self.nu - self.a


@dataclass
class CBResult:
    """Outcome of one game; placements log (in_bucket_a, heads) per step."""

    h: int
    h_a: int
    forfeit: bool
    placements: list[tuple[bool, bool]]


class HeadsPolicy:
    """Adversary interface: ``choose`` sees only earlier placements."""

    descriptor: dict

    def __init__(self, descriptor: dict):
        self.descriptor = descriptor

    def reset(self, params: CBParams) -> None:
        pass

    def choose(self, step: int, history: list[tuple[bool, bool]]) -> bool:
        raise NotImplementedError

    def face_stream(self, nu: int) -> Optional[np.ndarray]:
        """Pre-committed face sequence if the policy ignores buckets."""
        return None


class AllHeadsPolicy(HeadsPolicy):
    def __init__(self):
        super().__init__({"kind": "all_heads"})

    def choose(self, step, history):
        return True

    def face_stream(self, nu):
        return np.ones(nu, dtype=np.bool_)


class AllTailsPolicy(HeadsPolicy):
    def __init__(self):
        super().__init__({"kind": "all_tails"})

    def choose(self, step, history):
        return False

    def face_stream(self, nu):
        return np.zeros(nu, dtype=np.bool_)


class BudgetHeadsPolicy(HeadsPolicy):
    """Heads on the first k steps, tails afterwards."""

    def __init__(self, k: int):
        if k < 0:
            raise ValueError(f"budget must be non-negative, got {k}")
        self.k = int(k)
        super().__init__({"kind": "budget", "k": self.k})

    def choose(self, step, history):
        return step < self.k

    def face_stream(self, nu):
        return np.arange(nu) < self.k


class ThresholdHeadsPolicy(HeadsPolicy):
    """Heads whenever that keeps the heads fraction tracking the target."""

    def __init__(self, target: float):
        if not 0.0 <= target <= 1.0:
            raise ValueError(f"target must be in [0, 1], got {target}")
        self.target = float(target)
        super().__init__({"kind": "threshold", "target": self.target})

    def reset(self, params):
        self._heads = 0

    def choose(self, step, history):
        ans = self._heads < self.target * (step + 1)
        if ans:
            self._heads += 1
        return ans

    def face_stream(self, nu):
        t = np.arange(nu, dtype=np.float64)
        return np.ceil(self.target * t) < self.target * (t + 1.0)


class ScriptedHeadsPolicy(HeadsPolicy):
    """Fixed face pattern; must cover the whole game."""

    def __init__(self, faces: Sequence):
        self.faces = np.asarray([bool(f) for f in faces], dtype=np.bool_)
        super().__init__(
            {"kind": "scripted", "faces": [int(f) for f in self.faces]}
        )

    def reset(self, params):
        if len(self.faces) < params.nu:
            raise ValueError(
                f"scripted policy has {len(self.faces)} faces, game needs {params.nu}"
            )

    def choose(self, step, history):
        return bool(self.faces[step])

    def face_stream(self, nu):
        if len(self.faces) < nu:
            raise ValueError("face script shorter than the game")
        return self.faces[:nu]


class DiscrepancyChaserPolicy(HeadsPolicy):
    """Bucket-adaptive adversary: plays heads while the discrepancy
    nu*h_A - a*h is non-positive, chasing a positive score."""

    def __init__(self):
        super().__init__({"kind": "chaser"})

    def reset(self, params):
        self._a = params.a
        self._nu = params.nu
        self._h = 0
        self._ha = 0
        self._seen = 0

    def choose(self, step, history):
        while self._seen < len(history):
            in_a, heads = history[self._seen]
            self._seen += 1
            if heads:
                self._h += 1
                if in_a:
                    self._ha += 1
        return self._nu * self._ha - self._a * self._h <= 0


def make_heads_policy(kind: str, **params) -> HeadsPolicy:
    if kind == "all_heads":
        return AllHeadsPolicy()
    if kind == "all_tails":
        return AllTailsPolicy()
    if kind == "budget":
        return BudgetHeadsPolicy(params["k"])
    if kind == "threshold":
        return ThresholdHeadsPolicy(params["target"])
    if kind == "scripted":
        return ScriptedHeadsPolicy(params["faces"])
    if kind == "chaser":
        return DiscrepancyChaserPolicy()
    raise ValueError(f"unknown heads policy kind {kind!r}")


# ---------------------------------------------------------------------------
# sampling


def sample_x_ab(a: int, b: int, rng: np.random.Generator) -> Fraction:
    """One draw of X_{a,b}: 1/a with probability a/(a+b), else -1/b."""
    if a <= 0 or b <= 0:
        raise ValueError(f"a and b must be positive, got a={a}, b={b}")
    if rng.random() < a / (a + b):
        return Fraction(1, a)
    return Fraction(-1, b)


def sample_x_ab_batch(a: int, b: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Float-valued batch of X_{a,b} draws (for Monte Carlo summaries)."""
    if a <= 0 or b <= 0:
        raise ValueError(f"a and b must be positive, got a={a}, b={b}")
    hi = rng.random(size) < a / (a + b)
    return np.where(hi, 1.0 / a, -1.0 / b)


def _sample_subset(rng: np.random.Generator, nu: int, a: int) -> np.ndarray:
    """Uniform a-subset of range(nu) by partial Fisher-Yates shuffle."""
    arr = np.arange(nu)
    for t in range(a):
        j = int(rng.integers(t, nu))
        arr[t], arr[j] = arr[j], arr[t]
    return arr[:a]


def _membership(rng: np.random.Generator, params: CBParams, mode: str) -> np.ndarray:
    if mode == EXACT_SUBSET:
        in_a = np.zeros(params.nu, dtype=np.bool_)
        in_a[_sample_subset(rng, params.nu, params.a)] = True
        return in_a
    if mode == INDEPENDENT:
        return rng.random(params.nu) < params.a / params.nu
    raise ValueError(f"unknown mode {mode!r}")


def play_coins_buckets(
    params: CBParams, policy: HeadsPolicy, mode: str, seed: int
) -> CBResult:
    """Run one full game; the bucket of step t is revealed after step t."""
    rng = generator(seed)
    in_a = _membership(rng, params, mode)
    policy.reset(params)
    placements: list[tuple[bool, bool]] = []
    h = 0
    h_a = 0
    for t in range(params.nu):
        face = bool(policy.choose(t, placements))
        if face:
            h += 1
            if in_a[t]:
                h_a += 1
        placements.append((bool(in_a[t]), face))
    return CBResult(h=h, h_a=h_a, forfeit=h < params.nu0, placements=placements)


def cb_score(result: CBResult, params: CBParams) -> Fraction:
    """|h_A - a*h/nu| as an exact rational; zero on forfeit."""
    if result.forfeit:
        return Fraction(0)
    return abs(Fraction(result.h_a) - Fraction(params.a * result.h, params.nu))


# ---------------------------------------------------------------------------
# batched trial running (bitwise-identical to per-trial play for policies
# that pre-commit their faces; verified by tests)


def run_trials(
    params: CBParams, policy: HeadsPolicy, mode: str, trials: int, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """(h, h_A) arrays over ``trials`` independent games.

    Trial i uses seed ``mix(seed, i)`` exactly like a loop over
    :func:`play_coins_buckets`; stream-capable policies skip the per-step
    Python loop but consume identical draws.
    """
    faces = policy.face_stream(params.nu)
    hs = np.empty(trials, dtype=np.int64)
    has = np.empty(trials, dtype=np.int64)
    if faces is None:
        for i in range(trials):
            res = play_coins_buckets(params, policy, mode, mix(seed, i))
            hs[i] = res.h
            has[i] = res.h_a
        return hs, has
    h = int(np.count_nonzero(faces))
    for i in range(trials):
        rng = generator(mix(seed, i))
        if mode == EXACT_SUBSET:
            sel = _sample_subset(rng, params.nu, params.a)
            has[i] = int(np.count_nonzero(faces[sel]))
        else:
            in_a = rng.random(params.nu) < params.a / params.nu
            has[i] = int(np.count_nonzero(faces & in_a))
        hs[i] = h
    return hs, has


def martingale_mean(
    params: CBParams, policy: HeadsPolicy, trials: int, seed: int
) -> tuple[float, float]:
    """Monte Carlo mean and standard error of h_A - (a/nu)*h in
    independent mode (zero in expectation for every policy)."""
    hs, has = run_trials(params, policy, INDEPENDENT, trials, seed)
    z = has - (params.a / params.nu) * hs
    se = float(z.std(ddof=1) / math.sqrt(trials)) if trials > 1 else float("inf")
    return float(z.mean()), se


# ---------------------------------------------------------------------------
# tail bounds


@dataclass(frozen=True)
class BoundValue:
    raw: float
    clamped: float


def _clamp(raw: float) -> BoundValue:
    return BoundValue(raw=raw, clamped=min(raw, 1.0))


def tail_bound_bucket(params: CBParams, t: Rational) -> BoundValue:
    """(80*sqrt(nu)/t^2) * exp(-nu0*nu*t^2 / (20a)) for 0 < t < a/nu."""
    tf = Fraction(t)
    if not 0 < tf < Fraction(params.a, params.nu):
        raise ValueError(
            f"t={t} outside (0, a/nu) = (0, {params.a}/{params.nu})"
        )
    tx = float(tf)
    raw = (80.0 * math.sqrt(params.nu) / tx**2) * math.exp(
        -params.nu0 * params.nu * tx**2 / (20.0 * params.a)
    )
    return _clamp(raw)


def tail_bound_simple(a: int, b: int, nu0: int, t: Rational) -> BoundValue:
    """(40/t^2) * exp(-nu0*nu*t^2 / (20a)), nu = a+b, for 0 < t < a/b."""
    if a < 1 or b < 1 or nu0 < 1:
        raise ValueError("a, b, nu0 must be positive integers")
    if a > b:
        raise ValueError(f"hypothesis a <= b violated: a={a}, b={b}")
    nu = a + b
    if nu0 > nu:
        raise ValueError(f"nu0={nu0} must not exceed nu={nu}")
    tf = Fraction(t)
    if not 0 < tf < Fraction(a, b):
        raise ValueError(f"t={t} outside (0, a/b) = (0, {a}/{b})")
    tx = float(tf)
    raw = (40.0 / tx**2) * math.exp(-nu0 * nu * tx**2 / (20.0 * a))
    return _clamp(raw)


def tail_bound_bohman(c1: float, c2: float, m: int, lam: float) -> BoundValue:
    """2 * exp(-lam^2 / (3*c1*c2*m)) for 0 < c1 <= c2/10, 0 < lam < m*c1."""
    if not (c1 > 0 and c2 > 0):
        raise ValueError("c1 and c2 must be positive")
    if c1 > c2 / 10:
        raise ValueError(f"hypothesis c1 <= c2/10 violated: c1={c1}, c2={c2}")
    if m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    if not 0 < lam < m * c1:
        raise ValueError(f"lambda={lam} outside (0, m*c1) = (0, {m * c1})")
    raw = 2.0 * math.exp(-(lam**2) / (3.0 * c1 * c2 * m))
    return _clamp(raw)


# ---------------------------------------------------------------------------
# empirical tail measurement


def wilson_interval(hits: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be positive")
    phat = hits / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(
        phat * (1 - phat) / trials + z * z / (4 * trials * trials)
    )
    lo = 0.0 if hits == 0 else max(0.0, center - half)
    hi = 1.0 if hits == trials else min(1.0, center + half)
    return (lo, hi)


@dataclass(frozen=True)
class TailEstimate:
    hits: int
    trials: int
    frequency: float
    wilson_95_interval: tuple[float, float]
    bound: BoundValue


def empirical_tail(
    params: CBParams, policy: HeadsPolicy, t: Rational, trials: int, seed: int
) -> TailEstimate:
    """Monte Carlo frequency of (h >= nu0) and (score >= t*h) in
    exact-subset mode, with the analytic tail bound at the same point.

    The event is decided in exact arithmetic: |nu*h_A - a*h| >= t*h*nu.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    tf = Fraction(t)
    bound = tail_bound_bucket(params, tf)  # also validates t's range
    hs, has = run_trials(params, policy, EXACT_SUBSET, trials, seed)
    lhs = np.abs(params.nu * has - params.a * hs)  # integer-valued
    # t*h*nu as exact rationals: compare lhs * denom >= num * h * nu
    num, den = tf.numerator, tf.denominator
    event = (hs >= params.nu0) & (lhs * den >= num * hs * params.nu)
    hits = int(np.count_nonzero(event))
    return TailEstimate(
        hits=hits,
        trials=trials,
        frequency=hits / trials,
        wilson_95_interval=wilson_interval(hits, trials),
        bound=bound,
    )
