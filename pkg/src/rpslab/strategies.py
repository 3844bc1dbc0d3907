"""Proposer and decider strategies.

The decider interface enforces the game's information asymmetry at the API
level: ``decide(turn_index, history)`` receives the index of the current
turn and the (pair, answer) records of strictly earlier turns -- nothing
about the pair currently on the table.

Deciders whose answers do not depend on the pair history can pre-commit an
answer stream (``answer_stream()``), which lets the engine run batched
drivers.  Every shipped decider except ``scripted`` does.

The structured proposer (descriptor kind ``paper_proposer``) partitions the
vertices into U, V, A, B, plays ``n/6`` periods of exactly ``n/3`` proposals
each from a compiled pair list, then finishes with the remaining legal pairs
in one uniformly shuffled pass.  Period lists are built so that no listed
pair can close before it is proposed; the engine asserts that on every
proposal and raises loudly if it ever fails.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import log2
from typing import Optional, Sequence

import numpy as np

from . import game as _g
from . import pairs as _p
from .seeding import SplitMix64Stream, generator, mix


class StrategyInvariantError(_g.GameError):
    """A structural guarantee of a strategy failed at runtime."""


class UnsupportedNError(ValueError):
    """No valid epoch schedule exists for this vertex count."""


# ---------------------------------------------------------------------------
# deciders


class DeciderPolicy:
    """Base decider. Subclasses set ``descriptor`` and implement ``decide``."""

    descriptor: dict

    def __init__(self, descriptor: dict, salt: int = 0):
        self.descriptor = descriptor
        self.salt = salt

    def start_game(self, n: int, seed: int) -> None:
        self._n = n
        self._seed = mix(seed, self.salt)

    def decide(self, turn_index: int, history) -> bool:
        raise NotImplementedError

    def answer_stream(self):
        """Batched answer source, or None if this decider cannot pre-commit."""
        return None


class _ArrayStream:
    """Answer stream backed by a per-block generator function."""

    def __init__(self, fn):
        self._fn = fn
        self._pos = 0

    def take(self, count: int) -> np.ndarray:
        out = self._fn(self._pos, count)
        self._pos += count
        return out


class IidDecider(DeciderPolicy):
    """Answers YES independently with probability p on every turn."""

    def __init__(self, p: float, salt: int = 0):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p must be in [0, 1], got {p}")
        self.p = float(p)
        super().__init__({"kind": "iid", "p": self.p}, salt)

    def start_game(self, n: int, seed: int) -> None:
        super().start_game(n, seed)
        self._rng = generator(self._seed)

    def decide(self, turn_index: int, history) -> bool:
        return bool(self._rng.random() < self.p)

    def answer_stream(self):
        rng, p = self._rng, self.p
        return _ArrayStream(lambda pos, count: rng.random(count) < p)


class AlwaysYesDecider(DeciderPolicy):
    def __init__(self, salt: int = 0):
        super().__init__({"kind": "always_yes"}, salt)

    def decide(self, turn_index: int, history) -> bool:
        return True

    def answer_stream(self):
        return _ArrayStream(lambda pos, count: np.ones(count, dtype=np.bool_))


class AlwaysNoDecider(DeciderPolicy):
    def __init__(self, salt: int = 0):
        super().__init__({"kind": "always_no"}, salt)

    def decide(self, turn_index: int, history) -> bool:
        return False

    def answer_stream(self):
        return _ArrayStream(lambda pos, count: np.zeros(count, dtype=np.bool_))


class BudgetDecider(DeciderPolicy):
    """YES on the first k turns, NO afterwards."""

    def __init__(self, k: int, salt: int = 0):
        if k < 0:
            raise ValueError(f"budget must be non-negative, got {k}")
        self.k = int(k)
        super().__init__({"kind": "budget", "k": self.k}, salt)

    def decide(self, turn_index: int, history) -> bool:
        return turn_index < self.k

    def answer_stream(self):
        k = self.k
        return _ArrayStream(
            lambda pos, count: np.arange(pos, pos + count) < k
        )


class ScriptedDecider(DeciderPolicy):
    """Plays a fixed answer list; raises if the game outlives the script."""

    def __init__(self, answers: Sequence, salt: int = 0):
        self.answers = [_parse_answer(a) for a in answers]
        desc_answers = ["YES" if a else "NO" for a in self.answers]
        super().__init__({"kind": "scripted", "answers": desc_answers}, salt)

    def decide(self, turn_index: int, history) -> bool:
        if turn_index >= len(self.answers):
            raise _g.ProtocolViolationError(
                f"scripted decider exhausted after {len(self.answers)} answers"
            )
        return self.answers[turn_index]


class AdaptiveThresholdDecider(DeciderPolicy):
    """YES whenever saying YES keeps the running YES fraction at or below
    the target: answer YES at turn t iff yes_so_far < target * (t + 1).

    The resulting YES count after t turns is ceil(target * t), which gives
    the closed-form answer stream used by the batched drivers.
    """

    def __init__(self, target: float, salt: int = 0):
        if not 0.0 <= target <= 1.0:
            raise ValueError(f"target must be in [0, 1], got {target}")
        self.target = float(target)
        super().__init__({"kind": "adaptive_threshold", "target": self.target}, salt)

    def start_game(self, n: int, seed: int) -> None:
        super().start_game(n, seed)
        self._yes = 0

    def decide(self, turn_index: int, history) -> bool:
        ans = self._yes < self.target * (turn_index + 1)
        if ans:
            self._yes += 1
        return ans

    def answer_stream(self):
        target = self.target

        def block(pos, count):
            t = np.arange(pos, pos + count, dtype=np.float64)
            return np.ceil(target * t) < target * (t + 1.0)

        return _ArrayStream(block)


def _parse_answer(a) -> bool:
    if isinstance(a, str):
        if a.upper() == "YES":
            return True
        if a.upper() == "NO":
            return False
        raise ValueError(f"bad scripted answer {a!r}")
    return bool(a)


_DECIDER_KINDS = {
    "iid",
    "always_yes",
    "always_no",
    "budget",
    "scripted",
    "adaptive_threshold",
}


def make_decider(kind: str, **params) -> DeciderPolicy:
    """Build a decider from its descriptor kind and parameters."""
    if kind == "iid":
        return IidDecider(params["p"], params.get("seed", 0))
    if kind == "always_yes":
        return AlwaysYesDecider(params.get("seed", 0))
    if kind == "always_no":
        return AlwaysNoDecider(params.get("seed", 0))
    if kind == "budget":
        return BudgetDecider(params["k"], params.get("seed", 0))
    if kind == "scripted":
        return ScriptedDecider(params["answers"], params.get("seed", 0))
    if kind == "adaptive_threshold":
        return AdaptiveThresholdDecider(params["target"], params.get("seed", 0))
    raise ValueError(f"unknown decider kind {kind!r}; known: {sorted(_DECIDER_KINDS)}")


def decider_from_descriptor(desc: dict) -> DeciderPolicy:
    params = {k: v for k, v in desc.items() if k != "kind"}
    return make_decider(desc["kind"], **params)


# ---------------------------------------------------------------------------
# proposers


class ProposerPolicy:
    descriptor: dict

    def __init__(self, descriptor: dict, salt: int = 0):
        self.descriptor = descriptor
        self.salt = salt

    def start_game(self, n: int, seed: int) -> None:
        self._n = n
        self._seed = mix(seed, self.salt)

    def propose(self, state: _g.GameState, history) -> _p.Pair:
        raise NotImplementedError

    def drive(self, state: _g.GameState, stream, rec: _g.TurnRecorder) -> bool:
        """Fast batched driver; return False to fall back to per-turn play."""
        return False


class UniformProposer(ProposerPolicy):
    """Uniformly random legal pair each turn (rejection over a live list)."""

    def __init__(self, salt: int = 0):
        desc = {"kind": "uniform"}
        if salt:
            desc["seed"] = salt
        super().__init__(desc, salt)

    def start_game(self, n: int, seed: int) -> None:
        super().start_game(n, seed)
        self._sm = SplitMix64Stream(self._seed)
        self._live: Optional[np.ndarray] = None
        self._len = 0

    def propose(self, state: _g.GameState, history) -> _p.Pair:
        if self._live is None:
            self._live = np.arange(_p.num_pairs(state.n), dtype=np.int32)
            self._len = self._live.size
        status, forbidden = state.status, state.forbidden
        while True:
            j = self._sm.bounded(self._len)
            k = int(self._live[j])
            if status[k] == _g.PairStatus.OPEN and not forbidden[k]:
                break
            self._len -= 1
            self._live[j] = self._live[self._len]
        self._len -= 1
        self._live[j] = self._live[self._len]
        return _p.pair_from_index(state.n, k)

    def drive(self, state: _g.GameState, stream, rec: _g.TurnRecorder) -> bool:
        sm_state = np.array([self._sm.state], dtype=np.uint64)
        _g.run_uniform_stream(state, stream, rec, sm_state)
        self._sm.state = int(sm_state[0])
        return True


def uniform_random_proposer(seed: int = 0) -> UniformProposer:
    return UniformProposer(salt=seed)


# ---------------------------------------------------------------------------
# partition / schedule / period plans


@dataclass(frozen=True)
class Partition:
    """Disjoint ordered vertex classes; |U| = |V| = n/6, |A| = |B| = n/3."""

    n: int
    U: np.ndarray
    V: np.ndarray
    A: np.ndarray
    B: np.ndarray


def build_partition(n: int) -> Partition:
    if n % 6 != 0:
        raise ValueError(f"n must be divisible by 6, got {n}")
    if n < 12:
        raise ValueError(f"n must be at least 12, got {n}")
    n6, n3 = n // 6, n // 3
    idx = np.arange(n, dtype=np.int32)
    return Partition(
        n=n,
        U=idx[:n6],
        V=idx[n6 : 2 * n6],
        A=idx[2 * n6 : 2 * n6 + n3],
        B=idx[2 * n6 + n3 :],
    )


def log_star(n: int) -> int:
    """Least k such that applying log2 k times to n gives a value <= 1."""
    if n < 2:
        raise ValueError(f"log_star needs n >= 2, got {n}")
    x = float(n)
    k = 0
    while x > 1.0:
        x = log2(x)
        k += 1
    return k


@dataclass(frozen=True)
class EpochSchedule:
    """Epoch weights and the period blocks they map to.

    ``eps[k]`` is exact (1/(6*2^(k+1)) for all but the doubled last epoch),
    summing to 1/6; ``periods[k]`` lists the 1-based period indices of epoch
    k+1, with sizes from largest-remainder rounding of eps*n (minimum 1).
    """

    n: int
    m: int
    eps: tuple[Fraction, ...]
    periods: tuple[tuple[int, ...], ...]

    @property
    def period_counts(self) -> tuple[int, ...]:
        return tuple(len(block) for block in self.periods)


def epoch_schedule(n: int) -> EpochSchedule:
    if n % 6 != 0:
        raise ValueError(f"n must be divisible by 6, got {n}")
    if n < 12:
        raise ValueError(f"n must be at least 12, got {n}")
    m = log_star(n) + 1
    eps = [Fraction(1, 6 * 2**k) for k in range(1, m)]
    eps.append(Fraction(1, 6 * 2 ** (m - 1)))
    total = n // 6
    if total < m:
        raise UnsupportedNError(
            f"n={n} has only {total} periods for {m} epochs; "
            f"every epoch needs at least one period"
        )
    quotas = [e * n for e in eps]
    counts = [int(q) for q in quotas]  # floors
    remainders = [q - c for q, c in zip(quotas, counts)]
    deficit = total - sum(counts)
    order = sorted(range(m), key=lambda k: (-remainders[k], k))
    for k in order[:deficit]:
        counts[k] += 1
    # minimum-1 adjustment: move periods from the largest epochs
    while min(counts) == 0:
        donor = max(range(m), key=lambda k: (counts[k], -k))
        if counts[donor] <= 1:
            raise UnsupportedNError(f"n={n}: cannot give every epoch a period")
        counts[donor] -= 1
        counts[counts.index(0)] += 1
    assert sum(counts) == total
    blocks = []
    start = 1
    for c in counts:
        blocks.append(tuple(range(start, start + c)))
        start += c
    return EpochSchedule(n=n, m=m, eps=tuple(eps), periods=tuple(blocks))


@dataclass
class PeriodPlan:
    """Compiled proposal list for one period, already shuffled."""

    index: int  # 1-based period number
    k: np.ndarray
    u: np.ndarray
    v: np.ndarray
    num_uv: int
    num_vv: int
    num_filler: int
    filler_cursor_after: int

    def __len__(self) -> int:
        return int(self.k.size)

    @property
    def pairs(self) -> list[_p.Pair]:
        return list(zip(self.u.tolist(), self.v.tolist()))


def compile_period_list(
    state: _g.GameState,
    part: Partition,
    i: int,
    filler_cursor: int,
    rng: Optional[np.random.Generator] = None,
) -> PeriodPlan:
    """Build period i's list: {u_i, v_j} for j > i, open {v_i, v_j} for j > i,
    then lexicographic never-proposed A x B filler up to n/3 pairs.
    """
    n, n6, n3 = part.n, part.n // 6, part.n // 3
    if not 1 <= i <= n6:
        raise ValueError(f"period index {i} out of range 1..{n6}")
    status, forbidden = state.status, state.forbidden

    u_i = int(part.U[i - 1])
    v_i = int(part.V[i - 1])
    v_tail = part.V[i:].astype(np.int64)

    uv_u = np.full(v_tail.size, u_i, dtype=np.int64)
    uv_k = _p.pair_index_arr(n, uv_u, v_tail)
    if not (np.all(status[uv_k] == _g.PairStatus.OPEN) and not forbidden[uv_k].any()):
        raise StrategyInvariantError(
            f"period {i}: a U-V pair is closed or forbidden at compile time"
        )

    vv_u = np.full(v_tail.size, v_i, dtype=np.int64)
    vv_k_all = _p.pair_index_arr(n, vv_u, v_tail)
    vv_mask = (status[vv_k_all] == _g.PairStatus.OPEN) & ~forbidden[vv_k_all]
    vv_k = vv_k_all[vv_mask]
    vv_v = v_tail[vv_mask]

    need = n3 - uv_k.size - vv_k.size
    if filler_cursor + need > n3 * n3:
        raise StrategyInvariantError(
            f"period {i}: filler pool exhausted ({filler_cursor} used, {need} needed)"
        )
    c = np.arange(filler_cursor, filler_cursor + need, dtype=np.int64)
    f_a = part.A.astype(np.int64)[c // n3]
    f_b = part.B.astype(np.int64)[c % n3]
    f_k = _p.pair_index_arr(n, f_a, f_b)
    if not (np.all(status[f_k] == _g.PairStatus.OPEN) and not forbidden[f_k].any()):
        raise StrategyInvariantError(
            f"period {i}: a filler pair is closed or forbidden at compile time"
        )

    k = np.concatenate([uv_k, vv_k, f_k]).astype(np.int32)
    u = np.concatenate([uv_u, np.full(vv_k.size, v_i, dtype=np.int64), f_a]).astype(np.int32)
    v = np.concatenate([v_tail, vv_v, f_b]).astype(np.int32)
    assert k.size == n3
    if rng is not None:
        perm = rng.permutation(k.size)
        k, u, v = k[perm], u[perm], v[perm]
    return PeriodPlan(
        index=i,
        k=k,
        u=u,
        v=v,
        num_uv=int(uv_k.size),
        num_vv=int(vv_k.size),
        num_filler=int(need),
        filler_cursor_after=filler_cursor + need,
    )


class PeriodListProposer(ProposerPolicy):
    """Period-driven proposer (descriptor kind ``paper_proposer``).

    Plays n/6 compiled periods of n/3 proposals each, then an endgame pass
    over the remaining legal pairs in uniformly shuffled order.  Asserts on
    every proposal that the planned pair is still open and unforbidden, that
    u_i starts its period isolated, and that filler consumption stays within
    n^2/18.
    """

    def __init__(self, n: int, salt: int = 0):
        if n % 6 != 0:
            raise ValueError(f"n must be divisible by 6, got {n}")
        if n < 12:
            raise ValueError(f"n must be at least 12, got {n}")
        self.n = n
        desc = {"kind": "paper_proposer"}
        if salt:
            desc["seed"] = salt
        super().__init__(desc, salt)

    def start_game(self, n: int, seed: int) -> None:
        if n != self.n:
            raise ValueError(f"proposer built for n={self.n}, game has n={n}")
        super().start_game(n, seed)
        self._rng = generator(self._seed)
        self._part = build_partition(n)
        self._period = 0
        self._filler_cursor = 0
        self.filler_used = 0
        self.period_proposal_counts: list[int] = []
        self._plan: Optional[PeriodPlan] = None
        self._pos = 0
        self._endgame: Optional[np.ndarray] = None
        self._epos = 0

    def _begin_period(self, state: _g.GameState) -> PeriodPlan:
        i = self._period + 1
        u_i = int(self._part.U[i - 1])
        if int(state.deg[u_i]) != 0:
            raise StrategyInvariantError(
                f"period {i}: root vertex u_{i} has degree {int(state.deg[u_i])} at period start"
            )
        plan = compile_period_list(state, self._part, i, self._filler_cursor, self._rng)
        self._filler_cursor = plan.filler_cursor_after
        self.filler_used += plan.num_filler
        budget = self.n * self.n // 18
        if self.filler_used > budget:
            raise StrategyInvariantError(
                f"filler budget exceeded: {self.filler_used} > {budget}"
            )
        self._period = i
        return plan

    # general (per-turn) path
    def propose(self, state: _g.GameState, history) -> _p.Pair:
        n6 = self.n // 6
        while True:
            if self._plan is not None:
                if self._pos < len(self._plan):
                    j = self._pos
                    self._pos += 1
                    k = int(self._plan.k[j])
                    pair = (int(self._plan.u[j]), int(self._plan.v[j]))
                    if state.forbidden[k]:
                        raise _g.PlannedPairUnavailableError(
                            f"planned pair {pair} already forbidden (period {self._plan.index})"
                        )
                    if state.status[k] != _g.PairStatus.OPEN:
                        raise _g.PlannedPairUnavailableError(
                            f"planned pair {pair} no longer open (period {self._plan.index})"
                        )
                    if self._pos == len(self._plan):
                        self.period_proposal_counts.append(len(self._plan))
                    return pair
                self._plan = None
            if self._period < n6:
                self._plan = self._begin_period(state)
                self._pos = 0
                continue
            if self._endgame is None:
                seq = _g.collect_open_not_forbidden(state)
                self._rng.shuffle(seq)
                self._endgame = seq
                self._epos = 0
            while self._epos < self._endgame.size:
                k = int(self._endgame[self._epos])
                self._epos += 1
                if state.status[k] == _g.PairStatus.OPEN and not state.forbidden[k]:
                    return _p.pair_from_index(state.n, k)
            raise _g.ProtocolViolationError(
                "period proposer queried with no legal moves left"
            )

    # batched path
    def drive(self, state: _g.GameState, stream, rec: _g.TurnRecorder) -> bool:
        n6 = self.n // 6
        for _ in range(n6):
            plan = self._begin_period(state)
            ans = stream.take(len(plan))
            _g.run_planned_block(state, plan.k, plan.u, plan.v, ans)
            rec.append_block(plan.k, ans)
            self.period_proposal_counts.append(len(plan))
        seq = _g.collect_open_not_forbidden(state)
        self._rng.shuffle(seq)
        _g.run_sequence_stream(state, seq, stream, rec)
        return True


def paper_proposer(n: int, seed: int = 0) -> PeriodListProposer:
    return PeriodListProposer(n, salt=seed)


def proposer_from_descriptor(desc: dict, n: int) -> ProposerPolicy:
    kind = desc["kind"]
    if kind == "uniform":
        return UniformProposer(salt=desc.get("seed", 0))
    if kind == "paper_proposer":
        return PeriodListProposer(n, salt=desc.get("seed", 0))
    raise ValueError(f"unknown proposer kind {kind!r}")
