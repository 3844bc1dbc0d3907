"""Exact mechanics of the Ramsey, Paper, Scissors game.

Two players build a triangle-free graph on ``n`` vertices.  Each turn the
proposer picks a pair that is *open* (its endpoints share no neighbor) and
not yet *forbidden* (never proposed before); the decider simultaneously
answers YES or NO without seeing the pair.  YES adds the edge and closes
every pair that now has a common neighbor; either way the pair becomes
forbidden.  The game ends when no open, unforbidden pair remains.

State is columnar: one uint8 status and one bool forbidden flag per
canonical pair index (see :mod:`rpslab.pairs`), plus fixed-capacity
adjacency rows.  ``open_not_forbidden_count`` is maintained exactly, so
terminality is O(1).

``play_game`` drives a full game and returns a replayable
:class:`Transcript`.  Deciders that can pre-commit their answer sequence
(all shipped ones except scripted) unlock batched drivers that run the
hot loops inside compiled kernels; the general per-turn loop is the
reference path and both are tested to produce identical transcripts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterator, NamedTuple, Optional, TextIO, Union

import numpy as np

from . import pairs as _p
from . import _kernels as _k
from .seeding import ROLE_DECIDER, ROLE_PROPOSER, derive

TRANSCRIPT_VERSION = 1

_ANSWER_BLOCK = 1 << 16
_OUT_BLOCK = 1 << 16
_SCAN_BLOCK = 1 << 22


class PairStatus(IntEnum):
    OPEN = _k.OPEN
    EDGE = _k.EDGE
    CLOSED = _k.CLOSED


class PairView(NamedTuple):
    status: PairStatus
    forbidden: bool


class GameError(Exception):
    """Base class for game-rule errors."""


class IllegalMoveError(GameError):
    """A proposed pair is not in the legal-move set; ``reason`` says why."""

    def __init__(self, pair: _p.Pair, reason: str):
        self.pair = pair
        self.reason = reason
        super().__init__(f"illegal move {pair}: pair is {reason}")


class ProtocolViolationError(GameError):
    """A policy broke the game protocol (named in the message)."""


class PlannedPairUnavailableError(GameError):
    """A pre-compiled pair was closed or forbidden when its turn came.

    This should be impossible for the period-list proposer; seeing it means
    the mechanics or the plan compiler is wrong, so it is raised loudly.
    """


class TranscriptParseError(ValueError):
    """Transcript file is structurally malformed."""


class GameState:
    """Evolving game position over ``n`` vertices."""

    __slots__ = ("n", "status", "forbidden", "adj", "deg", "counters")

    def __init__(self, n: int, initial_capacity: int = 8):
        self.n = n
        P = _p.num_pairs(n)
        self.status = np.zeros(P, dtype=np.uint8)
        self.forbidden = np.zeros(P, dtype=np.bool_)
        cap = min(max(initial_capacity, 4), max(n - 1, 4))
        self.adj = np.full((n, cap), -1, dtype=np.int32)
        self.deg = np.zeros(n, dtype=np.int32)
        self.counters = np.zeros(_k.NUM_COUNTERS, dtype=np.int64)
        self.counters[_k.C_OPEN_NF] = P
        self.counters[_k.C_PEND_J] = -1
        self.counters[_k.C_PEND_K] = -1

    @property
    def turn(self) -> int:
        return int(self.counters[_k.C_TURN])

    @property
    def open_not_forbidden_count(self) -> int:
        return int(self.counters[_k.C_OPEN_NF])

    def copy(self) -> "GameState":
        dup = GameState.__new__(GameState)
        dup.n = self.n
        dup.status = self.status.copy()
        dup.forbidden = self.forbidden.copy()
        dup.adj = self.adj.copy()
        dup.deg = self.deg.copy()
        dup.counters = self.counters.copy()
        return dup

    def ensure_capacity(self, needed: int) -> None:
        cap = self.adj.shape[1]
        if needed <= cap:
            return
        new_cap = cap
        while new_cap < needed:
            new_cap *= 2
        new_cap = min(new_cap, self.n - 1)
        grown = np.full((self.n, new_cap), -1, dtype=np.int32)
        grown[:, :cap] = self.adj
        self.adj = grown

    def neighbors(self, v: int) -> np.ndarray:
        return self.adj[v, : self.deg[v]]

    def edge_list(self) -> list[_p.Pair]:
        """Edges in canonical pair order (scan; meant for small n)."""
        ks = np.flatnonzero(self.status == _k.EDGE)
        u, v = _p.pairs_from_index_arr(self.n, ks)
        return list(zip(u.tolist(), v.tolist()))


def new_game(n: int) -> GameState:
    """Fresh state: every pair open, nothing forbidden, no edges."""
    if not isinstance(n, (int, np.integer)):
        raise ValueError(f"n must be an integer, got {type(n).__name__}")
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if n > _p.MAX_N:
        raise ValueError(f"n={n} exceeds the supported cap {_p.MAX_N}")
    return GameState(int(n))


def pair_status(state: GameState, pair: _p.Pair) -> PairView:
    u, v = _p.check_pair(state.n, *pair)
    k = _p.pair_index(state.n, u, v)
    return PairView(PairStatus(int(state.status[k])), bool(state.forbidden[k]))


def legal_moves(state: GameState) -> set[_p.Pair]:
    """All open, unforbidden pairs.  Materializes O(n^2) candidates."""
    ks = np.flatnonzero((state.status == _k.OPEN) & ~state.forbidden)
    u, v = _p.pairs_from_index_arr(state.n, ks)
    return set(zip(u.tolist(), v.tolist()))


def is_terminal(state: GameState) -> bool:
    return state.open_not_forbidden_count == 0


@dataclass(frozen=True)
class TurnRecord:
    turn_index: int
    pair: _p.Pair
    answer: bool  # True = YES


def apply_turn(state: GameState, pair: _p.Pair, answer: bool) -> TurnRecord:
    """Apply one turn; the pair must be open and unforbidden."""
    u, v = _p.check_pair(state.n, *pair)
    k = _p.pair_index(state.n, u, v)
    st = int(state.status[k])
    if state.forbidden[k]:
        raise IllegalMoveError((u, v), "forbidden")
    if st == _k.EDGE:
        raise IllegalMoveError((u, v), "edge")
    if st == _k.CLOSED:
        raise IllegalMoveError((u, v), "closed")
    idx = state.turn
    if answer:
        state.ensure_capacity(max(int(state.deg[u]), int(state.deg[v])) + 1)
    state.forbidden[k] = True
    state.counters[_k.C_OPEN_NF] -= 1
    state.counters[_k.C_TURN] += 1
    if answer:
        _k._apply_yes(
            state.status, state.forbidden, state.adj, state.deg,
            k, u, v, state.n, state.counters,
        )
    return TurnRecord(idx, (u, v), bool(answer))


class TurnRecorder:
    """Columnar append-only store of (pair index, answer) per turn."""

    def __init__(self, capacity: int = 1024):
        self._k = np.empty(capacity, dtype=np.int32)
        self._a = np.empty(capacity, dtype=np.bool_)
        self._len = 0

    def __len__(self) -> int:
        return self._len

    def _grow(self, needed: int) -> None:
        cap = self._k.size
        if needed <= cap:
            return
        while cap < needed:
            # gentler growth once arrays are large keeps peak memory down
            cap = cap * 2 if cap < (1 << 22) else cap + cap // 2
        self._k = np.resize(self._k, cap)
        self._a = np.resize(self._a, cap)

    def append(self, k: int, answer: bool) -> None:
        self._grow(self._len + 1)
        self._k[self._len] = k
        self._a[self._len] = answer
        self._len += 1

    def append_block(self, ks: np.ndarray, answers: np.ndarray) -> None:
        m = len(ks)
        self._grow(self._len + m)
        self._k[self._len : self._len + m] = ks
        self._a[self._len : self._len + m] = answers
        self._len += m

    def columns(self) -> tuple[np.ndarray, np.ndarray]:
        return self._k[: self._len].copy(), self._a[: self._len].copy()


class HistoryView:
    """Read-only view of the public transcript so far (pairs + answers)."""

    def __init__(self, rec: TurnRecorder, n: int):
        self._rec = rec
        self._n = n

    def __len__(self) -> int:
        return len(self._rec)

    def __getitem__(self, i: int) -> TurnRecord:
        if i < 0:
            i += len(self._rec)
        if not 0 <= i < len(self._rec):
            raise IndexError(i)
        k = int(self._rec._k[i])
        return TurnRecord(i, _p.pair_from_index(self._n, k), bool(self._rec._a[i]))


@dataclass
class Transcript:
    """Complete, replayable record of one game."""

    n: int
    target_s: int
    proposer: dict
    decider: dict
    master_seed: int
    pair_indices: np.ndarray
    answers: np.ndarray
    version: int = TRANSCRIPT_VERSION
    _edges: Optional[list[_p.Pair]] = field(default=None, repr=False, compare=False)

    @property
    def num_turns(self) -> int:
        return int(self.pair_indices.size)

    def turn(self, i: int) -> TurnRecord:
        k = int(self.pair_indices[i])
        return TurnRecord(i, _p.pair_from_index(self.n, k), bool(self.answers[i]))

    def turns(self) -> Iterator[TurnRecord]:
        for i in range(self.num_turns):
            yield self.turn(i)

    def edges_array(self) -> np.ndarray:
        """Built edges in build order, shape (m, 2) int64."""
        ks = self.pair_indices[self.answers]
        u, v = _p.pairs_from_index_arr(self.n, ks)
        return np.stack([u, v], axis=1)

    @property
    def final_edges(self) -> list[_p.Pair]:
        if self._edges is None:
            arr = self.edges_array()
            self._edges = [tuple(row) for row in arr.tolist()]
        return self._edges

    def num_edges(self) -> int:
        return int(np.count_nonzero(self.answers))

    def to_jsonl(self, f: Union[str, TextIO]) -> None:
        if isinstance(f, str):
            with open(f, "w") as fh:
                self.to_jsonl(fh)
            return
        header = {
            "version": self.version,
            "n": self.n,
            "target_s": self.target_s,
            "proposer": self.proposer,
            "decider": self.decider,
            "master_seed": self.master_seed,
        }
        f.write(json.dumps(header) + "\n")
        n = self.n
        for i in range(self.num_turns):
            u, v = _p.pair_from_index(n, int(self.pair_indices[i]))
            ans = "YES" if self.answers[i] else "NO"
            f.write(f'{{"i": {i}, "u": {u}, "v": {v}, "answer": "{ans}"}}\n')
        f.write(json.dumps({"edges": [list(e) for e in self.final_edges]}) + "\n")

    @classmethod
    def from_jsonl(cls, f: Union[str, TextIO]) -> "Transcript":
        if isinstance(f, str):
            with open(f) as fh:
                return cls.from_jsonl(fh)
        lines = [ln for ln in (raw.strip() for raw in f) if ln]
        if len(lines) < 2:
            raise TranscriptParseError("transcript needs a header and an edges line")
        try:
            header = json.loads(lines[0])
            body = [json.loads(ln) for ln in lines[1:-1]]
            tail = json.loads(lines[-1])
        except json.JSONDecodeError as e:
            raise TranscriptParseError(f"invalid JSON: {e}") from e
        for key in ("version", "n", "target_s", "proposer", "decider", "master_seed"):
            if key not in header:
                raise TranscriptParseError(f"header missing field {key!r}")
        if "edges" not in tail:
            raise TranscriptParseError("final line must carry the edges list")
        n = int(header["n"])
        if n < 2 or n > _p.MAX_N:
            raise TranscriptParseError(f"header n={n} out of range")
        ks = np.empty(len(body), dtype=np.int32)
        ans = np.empty(len(body), dtype=np.bool_)
        for j, rec in enumerate(body):
            try:
                u, v, a = int(rec["u"]), int(rec["v"]), rec["answer"]
            except (KeyError, TypeError, ValueError) as e:
                raise TranscriptParseError(f"turn line {j} malformed: {rec!r}") from e
            if a not in ("YES", "NO"):
                raise TranscriptParseError(f"turn line {j}: bad answer {a!r}")
            if u == v or min(u, v) < 0 or max(u, v) >= n:
                raise TranscriptParseError(f"turn line {j}: bad pair ({u}, {v})")
            if u > v:
                u, v = v, u
            ks[j] = _p.pair_index(n, u, v)
            ans[j] = a == "YES"
        edges = [(min(e), max(e)) for e in (tuple(x) for x in tail["edges"])]
        return cls(
            n=n,
            target_s=int(header["target_s"]),
            proposer=header["proposer"],
            decider=header["decider"],
            master_seed=int(header["master_seed"]),
            pair_indices=ks,
            answers=ans,
            _edges=edges,
        )


def replay_transcript(t: Transcript) -> GameState:
    """Re-apply every turn from scratch; raises on any illegal move."""
    state = new_game(t.n)
    for i in range(t.num_turns):
        k = int(t.pair_indices[i])
        apply_turn(state, _p.pair_from_index(t.n, k), bool(t.answers[i]))
    return state


# ---------------------------------------------------------------------------
# engine drivers


def collect_open_not_forbidden(state: GameState) -> np.ndarray:
    """Indices of all currently legal pairs, ascending, int32."""
    status, forbidden = state.status, state.forbidden
    parts = []
    for lo in range(0, status.size, _SCAN_BLOCK):
        hi = min(lo + _SCAN_BLOCK, status.size)
        hits = np.flatnonzero((status[lo:hi] == _k.OPEN) & ~forbidden[lo:hi])
        if hits.size:
            parts.append((hits + lo).astype(np.int32))
    if not parts:
        return np.empty(0, dtype=np.int32)
    return np.concatenate(parts)


def run_planned_block(
    state: GameState,
    k_arr: np.ndarray,
    u_arr: np.ndarray,
    v_arr: np.ndarray,
    ans: np.ndarray,
) -> None:
    """Propose a compiled pair list in order; all pairs must stay legal."""
    pos = 0
    while True:
        code, pos = _k.run_planned(
            state.status, state.forbidden, state.adj, state.deg,
            k_arr, u_arr, v_arr, ans, state.n, state.counters, pos,
        )
        if code == _k.OK:
            return
        if code == _k.NEED_CAPACITY:
            u, v = int(u_arr[pos]), int(v_arr[pos])
            state.ensure_capacity(max(int(state.deg[u]), int(state.deg[v])) + 1)
            continue
        u, v = int(u_arr[pos]), int(v_arr[pos])
        why = "forbidden" if code == _k.ERR_FORBIDDEN else "no longer open"
        raise PlannedPairUnavailableError(
            f"planned pair ({u}, {v}) at plan position {pos} is {why} "
            f"(turn {state.turn})"
        )


def run_sequence_stream(
    state: GameState,
    sequence: np.ndarray,
    stream,
    rec: TurnRecorder,
) -> None:
    """Walk a pair-index sequence with skip semantics, answers from a stream."""
    out_k = np.empty(_OUT_BLOCK, dtype=np.int32)
    out_a = np.empty(_OUT_BLOCK, dtype=np.bool_)
    ans = stream.take(min(_ANSWER_BLOCK, max(sequence.size, 1)))
    state.counters[_k.C_ANS] = 0
    state.counters[_k.C_OUT] = 0
    pos = 0
    while True:
        code, pos = _k.run_sequence(
            state.status, state.forbidden, state.adj, state.deg,
            sequence, ans, out_k, out_a, state.n, state.counters, pos,
        )
        if code in (_k.OK, _k.TERMINAL):
            break
        if code == _k.NEED_ANSWERS:
            nout = int(state.counters[_k.C_OUT])
            rec.append_block(out_k[:nout], out_a[:nout])
            state.counters[_k.C_OUT] = 0
            ans = stream.take(_ANSWER_BLOCK)
            state.counters[_k.C_ANS] = 0
        elif code == _k.OUT_FULL:
            rec.append_block(out_k, out_a)
            state.counters[_k.C_OUT] = 0
        elif code == _k.NEED_CAPACITY:
            u, v = _p.pair_from_index(state.n, int(sequence[pos]))
            state.ensure_capacity(max(int(state.deg[u]), int(state.deg[v])) + 1)
    nout = int(state.counters[_k.C_OUT])
    rec.append_block(out_k[:nout], out_a[:nout])
    state.counters[_k.C_OUT] = 0


def run_uniform_stream(
    state: GameState,
    stream,
    rec: TurnRecorder,
    sm_state: np.ndarray,
) -> None:
    """Per-turn uniform proposer against an answer stream, in-kernel."""
    live = np.arange(_p.num_pairs(state.n), dtype=np.int32)
    state.counters[_k.C_LIVE] = live.size
    state.counters[_k.C_PEND_J] = -1
    state.counters[_k.C_PEND_K] = -1
    out_k = np.empty(_OUT_BLOCK, dtype=np.int32)
    out_a = np.empty(_OUT_BLOCK, dtype=np.bool_)
    ans = stream.take(_ANSWER_BLOCK)
    state.counters[_k.C_ANS] = 0
    state.counters[_k.C_OUT] = 0
    while True:
        code, _ = _k.run_uniform(
            state.status, state.forbidden, state.adj, state.deg,
            live, ans, out_k, out_a, state.n, state.counters, sm_state,
        )
        if code == _k.TERMINAL:
            break
        if code == _k.NEED_ANSWERS:
            nout = int(state.counters[_k.C_OUT])
            rec.append_block(out_k[:nout], out_a[:nout])
            state.counters[_k.C_OUT] = 0
            ans = stream.take(_ANSWER_BLOCK)
            state.counters[_k.C_ANS] = 0
        elif code == _k.OUT_FULL:
            rec.append_block(out_k, out_a)
            state.counters[_k.C_OUT] = 0
        elif code == _k.NEED_CAPACITY:
            k = int(state.counters[_k.C_PEND_K])
            u, v = _p.pair_from_index(state.n, k)
            state.ensure_capacity(max(int(state.deg[u]), int(state.deg[v])) + 1)
    nout = int(state.counters[_k.C_OUT])
    rec.append_block(out_k[:nout], out_a[:nout])
    state.counters[_k.C_OUT] = 0


def play_game(
    n: int,
    proposer,
    decider,
    target_s: int,
    master_seed: int,
    engine: str = "auto",
) -> Transcript:
    """Play one full game and return its transcript.

    The decider is queried first each turn with only the public history;
    the proposer then supplies a legal pair.  Win adjudication is separate
    (see :mod:`rpslab.analysis`).  ``engine="general"`` forces the per-turn
    reference loop (used by tests to cross-check the batched drivers).
    """
    state = new_game(n)
    if not 1 <= target_s <= n:
        raise ValueError(f"target_s must be in [1, n], got {target_s}")
    if engine not in ("auto", "general"):
        raise ValueError(f"unknown engine {engine!r}")
    proposer.start_game(n, derive(master_seed, ROLE_PROPOSER))
    decider.start_game(n, derive(master_seed, ROLE_DECIDER))
    rec = TurnRecorder()
    stream = decider.answer_stream() if engine == "auto" else None
    driven = False
    if stream is not None:
        driven = proposer.drive(state, stream, rec)
    if not driven:
        hist = HistoryView(rec, n)
        while state.open_not_forbidden_count > 0:
            answer = bool(decider.decide(state.turn, hist))
            pair = proposer.propose(state, hist)
            try:
                turn = apply_turn(state, pair, answer)
            except IllegalMoveError as e:
                raise ProtocolViolationError(
                    f"proposer {proposer.descriptor} proposed an illegal "
                    f"pair {pair}: {e.reason}"
                ) from e
            rec.append(_p.pair_index(n, *turn.pair), answer)
    ks, ans = rec.columns()
    return Transcript(
        n=n,
        target_s=int(target_s),
        proposer=proposer.descriptor,
        decider=decider.descriptor,
        master_seed=int(master_seed),
        pair_indices=ks,
        answers=ans,
    )
