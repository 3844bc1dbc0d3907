"""Adjudication and measurement over final graphs and transcripts.

Covers independence-number certification (exact branch-and-bound under a
size cap, randomized min-degree greedy above it), per-period/per-epoch
open-density statistics, structural checks (reachable subgraph, pairs
closed from outside a set, maximal triangle-freeness), transcript
verification, the clairvoyant coupling harness, and win-threshold
estimation.

Open densities and per-period YES fractions are exact rationals; every
certificate is verified pairwise non-adjacent before it is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from . import game as _g
from . import pairs as _p
from . import strategies as _s
from ._kernels import greedy_min_degree
from .seeding import ROLE_PROPOSER, derive, generator, mix


class SizeLimitError(ValueError):
    """Graph too large for the exact solver; use the greedy certifier."""


class CertificateError(RuntimeError):
    """A produced certificate failed its own soundness check."""


@dataclass
class GraphView:
    """Immutable simple undirected graph: n plus canonical edge array."""

    n: int
    edges: np.ndarray  # (m, 2) int64, u < v
    _adj_sets: Optional[list[set[int]]] = field(default=None, repr=False, compare=False)
    _dense: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    _csr: Optional[tuple[np.ndarray, np.ndarray]] = field(
        default=None, repr=False, compare=False
    )

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "GraphView":
        rows = []
        for e in edges:
            u, v = _p.check_pair(n, int(e[0]), int(e[1]))
            rows.append((u, v))
        arr = np.array(sorted(set(rows)), dtype=np.int64).reshape(-1, 2)
        return cls(n=n, edges=arr)

    @classmethod
    def from_transcript(cls, t: _g.Transcript) -> "GraphView":
        return cls(n=t.n, edges=t.edges_array())

    @classmethod
    def from_state(cls, state: _g.GameState) -> "GraphView":
        return cls.from_edges(state.n, state.edge_list())

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    def average_degree(self) -> Fraction:
        return Fraction(2 * self.num_edges, self.n)

    def adjacency_sets(self) -> list[set[int]]:
        if self._adj_sets is None:
            adj: list[set[int]] = [set() for _ in range(self.n)]
            for u, v in self.edges.tolist():
                adj[u].add(v)
                adj[v].add(u)
            self._adj_sets = adj
        return self._adj_sets

    def dense_adjacency(self) -> np.ndarray:
        if self._dense is None:
            d = np.zeros((self.n, self.n), dtype=np.bool_)
            if self.num_edges:
                u, v = self.edges[:, 0], self.edges[:, 1]
                d[u, v] = True
                d[v, u] = True
            self._dense = d
        return self._dense

    def bit_rows(self) -> list[int]:
        """Adjacency rows as Python int bitmasks (vertex v -> bit 1<<v)."""
        rows = [0] * self.n
        for u, v in self.edges.tolist():
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return rows

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        if self._csr is None:
            self._csr = _build_csr(self.n, self.edges[:, 0], self.edges[:, 1])
        return self._csr


def _build_csr(n: int, eu: np.ndarray, ev: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric adjacency in CSR form from an edge list."""
    if eu.size == 0:
        return np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int64)
    all_u = np.concatenate([eu, ev]).astype(np.int64)
    all_v = np.concatenate([ev, eu]).astype(np.int64)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(all_u, minlength=n), out=indptr[1:])
    order = np.argsort(all_u, kind="stable")
    return indptr, all_v[order]


# ---------------------------------------------------------------------------
# structural checks


def is_triangle_free(g: GraphView) -> bool:
    dense = g.dense_adjacency()
    packed = np.packbits(dense, axis=1)
    for u, v in g.edges.tolist():
        if np.any(packed[u] & packed[v]):
            return False
    return True


def is_maximal_triangle_free(g: GraphView) -> bool:
    """Triangle-free and every non-edge has a common neighbor."""
    if not is_triangle_free(g):
        return False
    dense = g.dense_adjacency()
    packed = np.packbits(dense, axis=1)
    for u in range(g.n - 1):
        cands = np.flatnonzero(~dense[u, u + 1 :]) + u + 1
        if cands.size == 0:
            continue
        common = np.bitwise_and(packed[cands], packed[u])
        if not np.all(common.any(axis=1)):
            return False
    return True


def count_closed_by_outside(g: GraphView, subset: Iterable[int]) -> int:
    """Pairs {x, y} within the subset sharing a neighbor outside it."""
    S = sorted(set(int(v) for v in subset))
    for v in S:
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} out of range for n={g.n}")
    rows = g.bit_rows()
    outside = ~sum(1 << v for v in S)
    count = 0
    for i, x in enumerate(S):
        rx = rows[x] & outside
        for y in S[i + 1 :]:
            if rx & rows[y]:
                count += 1
    return count


def is_reachable_subgraph(g: GraphView, h: GraphView) -> bool:
    """True iff every g-edge missing from h completes a triangle with two
    h-edges (h must be a spanning subgraph of g)."""
    if h.n != g.n:
        raise ValueError(f"vertex sets differ: {g.n} vs {h.n}")
    g_edges = set(map(tuple, g.edges.tolist()))
    h_edges = set(map(tuple, h.edges.tolist()))
    if not h_edges <= g_edges:
        raise ValueError("h has edges outside g; not a subgraph")
    rows = h.bit_rows()
    for u, v in g_edges - h_edges:
        if not rows[u] & rows[v]:
            return False
    return True


def open_density(state: _g.GameState, subset: Sequence[int]) -> Fraction:
    """Fraction of subset-internal pairs currently open."""
    S = sorted(set(int(v) for v in subset))
    if len(S) < 2:
        raise ValueError(f"subset needs at least 2 vertices, got {len(S)}")
    for v in S:
        if not 0 <= v < state.n:
            raise ValueError(f"vertex {v} out of range for n={state.n}")
    arr = np.array(S, dtype=np.int64)
    iu, iv = np.triu_indices(len(S), k=1)
    ks = _p.pair_index_arr(state.n, arr[iu], arr[iv])
    open_count = int(np.count_nonzero(state.status[ks] == _g.PairStatus.OPEN))
    return Fraction(open_count, len(ks))


# ---------------------------------------------------------------------------
# independence certification


@dataclass(frozen=True)
class IndependentSetCertificate:
    vertices: tuple[int, ...]
    size: int
    method: str  # "EXACT" | "GREEDY"
    exact: bool

    @property
    def exact_flag(self) -> bool:
        return self.exact


def _check_independent(g: GraphView, verts: Sequence[int]) -> None:
    vs = sorted(int(v) for v in verts)
    if len(set(vs)) != len(vs):
        raise CertificateError("certificate lists a vertex twice")
    adj = g.adjacency_sets()
    vset = set(vs)
    for v in vs:
        if adj[v] & vset:
            raise CertificateError(f"certificate vertices {v} and "
                                   f"{sorted(adj[v] & vset)} are adjacent")


def _make_certificate(g: GraphView, verts: Sequence[int], method: str, exact: bool
                      ) -> IndependentSetCertificate:
    _check_independent(g, verts)
    vs = tuple(sorted(int(v) for v in verts))
    return IndependentSetCertificate(vertices=vs, size=len(vs), method=method, exact=exact)


EXACT_MIS_CAP = 120


def _mis_component(masks: list[int], cand: int, best: list) -> None:
    """Branch-and-bound over one component, bitmask candidates.

    best = [size, mask]; dominance rule folds in degree<=1 vertices, then
    branches on a maximum-degree vertex; popcount bound prunes.
    """
    cur_mask = 0
    cur = 0
    # iterative deepening via explicit stack of (cand, cur, cur_mask)
    stack = [(cand, cur, cur_mask)]
    while stack:
        cand, cur, cur_mask = stack.pop()
        # prune
        if cur + cand.bit_count() <= best[0]:
            continue
        # dominance: any vertex with <= 1 neighbor among candidates joins
        changed = True
        while changed and cand:
            changed = False
            m = cand
            while m:
                v = (m & -m).bit_length() - 1
                m &= m - 1
                if (masks[v] & cand).bit_count() <= 1:
                    cur_mask |= 1 << v
                    cur += 1
                    cand &= ~(masks[v] | (1 << v))
                    changed = True
                    break
        if cand == 0:
            if cur > best[0]:
                best[0] = cur
                best[1] = cur_mask
            continue
        if cur + cand.bit_count() <= best[0]:
            continue
        # branch on a maximum-degree candidate
        vmax, dmax = -1, -1
        m = cand
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            d = (masks[v] & cand).bit_count()
            if d > dmax:
                vmax, dmax = v, d
        stack.append((cand & ~(1 << vmax), cur, cur_mask))
        stack.append((cand & ~(masks[vmax] | (1 << vmax)), cur + 1, cur_mask | (1 << vmax)))


def exact_independence_number(g: GraphView) -> IndependentSetCertificate:
    """Maximum independent set by branch-and-bound; capped at n <= 120."""
    if g.n > EXACT_MIS_CAP:
        raise SizeLimitError(
            f"exact solver capped at n={EXACT_MIS_CAP} (got {g.n}); "
            f"use greedy_independent_set for larger graphs"
        )
    rows = g.bit_rows()
    unseen = (1 << g.n) - 1
    chosen = 0
    while unseen:
        # peel one connected component
        v = (unseen & -unseen).bit_length() - 1
        comp = 1 << v
        frontier = 1 << v
        while frontier:
            nxt = 0
            m = frontier
            while m:
                w = (m & -m).bit_length() - 1
                m &= m - 1
                nxt |= rows[w] & ~comp
            comp |= nxt
            frontier = nxt
        unseen &= ~comp
        # greedy seed for the lower bound
        seed_mask = 0
        c = comp
        while c:
            w = (c & -c).bit_length() - 1
            c &= c - 1
            if not (rows[w] & seed_mask):
                seed_mask |= 1 << w
        best = [seed_mask.bit_count(), seed_mask]
        _mis_component(rows, comp, best)
        chosen |= best[1]
    verts = [v for v in range(g.n) if chosen >> v & 1]
    return _make_certificate(g, verts, "EXACT", exact=True)


def greedy_independent_set(
    g: GraphView, repeats: int, seed: int
) -> IndependentSetCertificate:
    """Best of ``repeats`` random-permutation min-degree greedy runs.

    Each run feeds a fresh permutation to the kernel as its tie-breaking
    order and repeatedly peels a minimum-degree vertex, so every run is
    guaranteed at least ceil(n / (avg_degree + 1)) vertices.
    """
    if repeats < 1:
        raise ValueError(f"repeats must be at least 1, got {repeats}")
    rng = generator(seed)
    n = g.n
    turan = math.ceil(Fraction(n * n, 2 * g.num_edges + n))
    indptr, indices = g.csr()
    best_verts: Optional[np.ndarray] = None
    for _ in range(repeats):
        perm = rng.permutation(n)
        sel = greedy_min_degree(indptr, indices, n, perm)
        verts = np.flatnonzero(sel)
        if verts.size < turan:
            raise CertificateError(
                f"min-degree greedy returned {verts.size} < Turan floor {turan}"
            )
        if best_verts is None or verts.size > best_verts.size:
            best_verts = verts
    return _make_certificate(g, best_verts.tolist(), "GREEDY", exact=False)


def certify_graph(
    g: GraphView,
    seed: int = 0,
    exact_cap: int = EXACT_MIS_CAP,
    greedy_repeats: Optional[int] = None,
) -> IndependentSetCertificate:
    """Exact certificate when n fits under the cap, else best-of greedy."""
    if g.n <= exact_cap:
        return exact_independence_number(g)
    if greedy_repeats is None:
        greedy_repeats = math.ceil(math.log2(max(g.n, 2)))
    return greedy_independent_set(g, greedy_repeats, seed)


def shearer_bound(n_vertices: int, avg_degree: float) -> float:
    """Independence lower bound 2*n*log2(d)/(3d) for triangle-free graphs."""
    if avg_degree <= 1:
        raise ValueError(f"average degree must exceed 1, got {avg_degree}")
    return 2.0 * n_vertices * math.log2(avg_degree) / (3.0 * avg_degree)


# ---------------------------------------------------------------------------
# transcript verification


@dataclass(frozen=True)
class Violation:
    rule: str
    turn_index: int  # -1 for whole-transcript rules
    detail: str


@dataclass
class ValidationReport:
    ok: bool
    violations: list[Violation]


def verify_transcript(t: _g.Transcript) -> ValidationReport:
    """Replay from an empty graph, checking legality turn by turn.

    Rules: forbidden-reproposal, closed-pair-proposed, edge-pair-proposed,
    triangle-created (independent common-neighbor check on YES turns), and
    final-edges-mismatch.  Illegal turns are recorded and skipped.
    """
    violations: list[Violation] = []
    state = _g.new_game(t.n)
    adj = [set() for _ in range(t.n)]
    built: list[_p.Pair] = []
    for i in range(t.num_turns):
        k = int(t.pair_indices[i])
        u, v = _p.pair_from_index(t.n, k)
        answer = bool(t.answers[i])
        if state.forbidden[k]:
            violations.append(Violation("forbidden-reproposal", i, f"pair ({u}, {v})"))
            continue
        st = int(state.status[k])
        if st == _g.PairStatus.EDGE:
            violations.append(Violation("edge-pair-proposed", i, f"pair ({u}, {v})"))
            continue
        if st == _g.PairStatus.CLOSED:
            violations.append(Violation("closed-pair-proposed", i, f"pair ({u}, {v})"))
            continue
        if answer and adj[u] & adj[v]:
            violations.append(
                Violation("triangle-created", i,
                          f"pair ({u}, {v}) shares neighbors {sorted(adj[u] & adj[v])}")
            )
            continue
        _g.apply_turn(state, (u, v), answer)
        if answer:
            adj[u].add(v)
            adj[v].add(u)
            built.append((u, v))
    if built != t.final_edges:
        violations.append(
            Violation("final-edges-mismatch", -1,
                      f"replay built {len(built)} edges, transcript lists "
                      f"{len(t.final_edges)}")
        )
    return ValidationReport(ok=not violations, violations=violations)


# ---------------------------------------------------------------------------
# period / epoch statistics


@dataclass
class EpochStats:
    """Measured per-period and per-epoch quantities for one transcript.

    p[i-1] is the YES fraction of period i (out of n/3); P[k-1] averages it
    over epoch k.  o[k-1] is the open density inside V_k at the end of epoch
    k-1 (1 at the start of the game for k=1).  o_by_period[k-1][i] is the
    open density inside V_k after period i (index 0 = game start).
    decrement_* map (k, i) for i in epoch k-1 to the observed one-period
    density ratio and the reference factor 1 - p_i^2/16.  yes_rate_floor[k-1]
    is 200/(o_k*sqrt(n)), the YES rate below which the epoch's V_k is already
    certifiably sparse enough for the proposer.

    A V_k with a single vertex has no internal pairs; its density is taken
    as vacuously 1 (small-n schedules produce such epochs).
    """

    n: int
    p: list[Fraction]
    P: list[Fraction]
    o: list[Fraction]
    o_by_period: list[list[Fraction]]
    decrement_observed: dict[tuple[int, int], Optional[Fraction]]
    decrement_reference: dict[tuple[int, int], Fraction]
    yes_rate_floor: list[float]


def period_epoch_stats(
    t: _g.Transcript, sched: _s.EpochSchedule, part: _s.Partition
) -> EpochStats:
    n = t.n
    if sched.n != n or part.n != n:
        raise ValueError("schedule/partition vertex count does not match transcript")
    if t.proposer.get("kind") != "paper_proposer":
        raise ValueError("period statistics require a paper_proposer transcript")
    n3, n6 = n // 3, n // 6
    planned = n3 * n6
    if t.num_turns < planned:
        raise ValueError(
            f"transcript has {t.num_turns} turns; the period phase needs {planned}"
        )
    # V_k pair index tables
    vk_pairs: list[np.ndarray] = []
    pair_owner: dict[int, int] = {}
    for kk, block in enumerate(sched.periods):
        verts = np.array([part.V[i - 1] for i in block], dtype=np.int64)
        verts.sort()
        iu, iv = np.triu_indices(verts.size, k=1)
        ks = _p.pair_index_arr(n, verts[iu], verts[iv])
        vk_pairs.append(ks)
        for k_idx in ks.tolist():
            pair_owner[k_idx] = kk
    # a V_k with fewer than 2 vertices has no internal pairs; its density is
    # vacuously 1 (nothing is ever closed)
    denom = [ks.size for ks in vk_pairs]
    open_cnt = [ks.size for ks in vk_pairs]  # all pairs open at start
    m = sched.m

    def density(kk: int, count: int) -> Fraction:
        return Fraction(count, denom[kk]) if denom[kk] else Fraction(1)

    state = _g.new_game(n)
    o_by_period: list[list[Fraction]] = [[density(kk, open_cnt[kk])] for kk in range(m)]
    p_list: list[Fraction] = []
    yes_in_period = 0
    for i in range(planned):
        k_idx = int(t.pair_indices[i])
        answer = bool(t.answers[i])
        if answer:
            yes_in_period += 1
            u, v = _p.pair_from_index(n, k_idx)
            # independent closure accounting from current adjacency
            for w in state.neighbors(u).tolist():
                kk2 = _p.pair_index(n, *(sorted((w, v))))
                if state.status[kk2] == _g.PairStatus.OPEN and kk2 in pair_owner:
                    open_cnt[pair_owner[kk2]] -= 1
            for w in state.neighbors(v).tolist():
                kk2 = _p.pair_index(n, *(sorted((w, u))))
                if state.status[kk2] == _g.PairStatus.OPEN and kk2 in pair_owner:
                    open_cnt[pair_owner[kk2]] -= 1
            if k_idx in pair_owner:
                open_cnt[pair_owner[k_idx]] -= 1
        _g.apply_turn(state, _p.pair_from_index(n, k_idx), answer)
        if (i + 1) % n3 == 0:
            p_list.append(Fraction(yes_in_period, n3))
            yes_in_period = 0
            for kk in range(m):
                recount = int(
                    np.count_nonzero(state.status[vk_pairs[kk]] == _g.PairStatus.OPEN)
                )
                if recount != open_cnt[kk]:
                    raise AssertionError(
                        f"open-density accounting mismatch in V_{kk + 1} after "
                        f"period {(i + 1) // n3}: replay {recount} vs "
                        f"incremental {open_cnt[kk]}"
                    )
                o_by_period[kk].append(density(kk, recount))

    P_list = [
        sum(p_list[i - 1] for i in block) / len(block) for block in sched.periods
    ]
    o_list: list[Fraction] = [Fraction(1)]
    for kk in range(1, m):
        last_period_prev = sched.periods[kk - 1][-1]
        o_list.append(o_by_period[kk][last_period_prev])
    dec_obs: dict[tuple[int, int], Optional[Fraction]] = {}
    dec_ref: dict[tuple[int, int], Fraction] = {}
    for kk in range(1, m):
        for i in sched.periods[kk - 1]:
            prev = o_by_period[kk][i - 1]
            curr = o_by_period[kk][i]
            dec_obs[(kk + 1, i)] = None if prev == 0 else curr / prev
            dec_ref[(kk + 1, i)] = 1 - p_list[i - 1] ** 2 / 16
    floor = [
        float("inf") if o == 0 else 200.0 / (float(o) * math.sqrt(n)) for o in o_list
    ]
    return EpochStats(
        n=n,
        p=p_list,
        P=P_list,
        o=o_list,
        o_by_period=o_by_period,
        decrement_observed=dec_obs,
        decrement_reference=dec_ref,
        yes_rate_floor=floor,
    )


# ---------------------------------------------------------------------------
# clairvoyant coupling harness


class ClairvoyantDecider:
    """Harness-only decider that sees the proposed pair and answers by
    membership in a pre-sampled graph.  Deliberately not a DeciderPolicy:
    it cannot be passed to play_game."""

    def __init__(self, g_sample: GraphView):
        self.g_sample = g_sample
        self._edge_set = set(map(tuple, g_sample.edges.tolist()))
        self.descriptor = {"kind": "clairvoyant"}

    def decide_pair(self, pair: _p.Pair) -> bool:
        return tuple(pair) in self._edge_set


def coupled_clairvoyant_decider(g_sample: GraphView) -> ClairvoyantDecider:
    return ClairvoyantDecider(g_sample)


def play_clairvoyant_game(
    proposer, g_sample: GraphView, master_seed: int
) -> _g.Transcript:
    """Play with the clairvoyant decider (separate harness entry point)."""
    n = g_sample.n
    decider = ClairvoyantDecider(g_sample)
    state = _g.new_game(n)
    proposer.start_game(n, derive(master_seed, ROLE_PROPOSER))
    rec = _g.TurnRecorder()
    hist = _g.HistoryView(rec, n)
    while state.open_not_forbidden_count > 0:
        pair = proposer.propose(state, hist)
        answer = decider.decide_pair(pair)
        turn = _g.apply_turn(state, pair, answer)
        rec.append(_p.pair_index(n, *turn.pair), answer)
    ks, ans = rec.columns()
    return _g.Transcript(
        n=n,
        target_s=1,
        proposer=proposer.descriptor,
        decider=decider.descriptor,
        master_seed=int(master_seed),
        pair_indices=ks,
        answers=ans,
    )


# ---------------------------------------------------------------------------
# threshold estimation


def isotonic_non_increasing(y: Sequence[float]) -> list[float]:
    """Pool-adjacent-violators projection onto non-increasing sequences."""
    vals: list[float] = []
    weights: list[int] = []
    for x in y:
        vals.append(float(x))
        weights.append(1)
        while len(vals) > 1 and vals[-2] < vals[-1]:
            v = (vals[-2] * weights[-2] + vals[-1] * weights[-1]) / (
                weights[-2] + weights[-1]
            )
            w = weights[-2] + weights[-1]
            vals = vals[:-2] + [v]
            weights = weights[:-2] + [w]
    out: list[float] = []
    for v, w in zip(vals, weights):
        out.extend([v] * w)
    return out


@dataclass
class ThresholdEstimate:
    n: int
    proposer: dict
    decider: dict
    trials: int
    curve: list[tuple[int, int]]  # (s, wins)
    s_star: int
    certificate_method: str
    isotonic_changed: bool
    note: str


def estimate_threshold(
    n: int,
    proposer_desc: dict,
    decider_desc: dict,
    trials: int,
    seed: int,
) -> ThresholdEstimate:
    """Estimate the largest s with win probability >= 1/2.

    Games are independent of s, so one batch is adjudicated against every s:
    win(s) iff the game's best certificate reaches s.  Certificates are
    exact for n <= 120 and greedy (repeats = ceil(log2 n)) above, which
    makes large-n estimates conservative toward the decider.
    """
    if trials < 30:
        raise ValueError(f"trials must be at least 30, got {trials}")
    certs = np.empty(trials, dtype=np.int64)
    method = "EXACT" if n <= EXACT_MIS_CAP else "GREEDY"
    for i in range(trials):
        game_seed = mix(seed, i)
        proposer = _s.proposer_from_descriptor(proposer_desc, n)
        decider = _s.decider_from_descriptor(decider_desc)
        t = _g.play_game(n, proposer, decider, 1, game_seed)
        cert = certify_graph(GraphView.from_transcript(t), seed=mix(game_seed, 1))
        certs[i] = cert.size
    sorted_certs = np.sort(certs)
    svals = np.arange(1, n + 1)
    wins = trials - np.searchsorted(sorted_certs, svals, side="left")
    rates = wins / trials
    smoothed = isotonic_non_increasing(rates.tolist())
    changed = any(abs(a - b) > 1e-12 for a, b in zip(smoothed, rates.tolist()))
    s_star = 0
    for s, w in zip(svals.tolist(), wins.tolist()):
        if 2 * w >= trials:
            s_star = s
    note = (
        f"win(s) = fraction of {trials} games whose best {method} certificate "
        f"reaches s; greedy certificates lower-bound alpha, so win rates are "
        f"conservative toward the decider"
    )
    return ThresholdEstimate(
        n=n,
        proposer=proposer_desc,
        decider=decider_desc,
        trials=trials,
        curve=list(zip(svals.tolist(), wins.tolist())),
        s_star=int(s_star),
        certificate_method=method,
        isotonic_changed=changed,
        note=note,
    )
