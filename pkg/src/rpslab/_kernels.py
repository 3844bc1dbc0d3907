"""JIT-compiled inner loops for the game engine and the greedy certifier.

Everything here works on flat numpy state arrays:

* ``status`` uint8 per pair: 0 = open, 1 = edge, 2 = closed
* ``forbidden`` bool per pair
* ``adj``/``deg`` fixed-capacity adjacency rows (callers grow on demand)
* ``counters`` int64 scratch: [open_not_forbidden, turn, answer_ptr,
  out_len, live_len, pending_j, pending_k]

Kernels return ``(code, position)`` and are resumable so callers can grow
buffers and re-enter without disturbing game state:

    0 done   1 planned pair closed   2 planned pair forbidden
    3 adjacency capacity needed      4 terminal (no legal moves)
    5 answer buffer exhausted        6 output buffer full

Falls back to plain Python (same functions, no compilation) when numba is
unavailable; that path is orders of magnitude slower but semantically
identical, which the tests rely on.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit

    NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA = False

    def njit(*args, **kwargs):
        def deco(f):
            def wrapper(*a, **k):
                with np.errstate(over="ignore"):
                    return f(*a, **k)

            return wrapper

        if args and callable(args[0]):
            return deco(args[0])
        return deco


OPEN = 0
EDGE = 1
CLOSED = 2

C_OPEN_NF = 0
C_TURN = 1
C_ANS = 2
C_OUT = 3
C_LIVE = 4
C_PEND_J = 5
C_PEND_K = 6
NUM_COUNTERS = 7

OK = 0
ERR_CLOSED = 1
ERR_FORBIDDEN = 2
NEED_CAPACITY = 3
TERMINAL = 4
NEED_ANSWERS = 5
OUT_FULL = 6

_GOLD = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)


@njit(cache=True)
def _sm_next(sm):
    sm[0] = sm[0] + _GOLD
    z = sm[0]
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True)
def _sm_bounded(sm, n):
    """Exactly uniform draw in [0, n) by rejection below the top multiple."""
    un = np.uint64(n)
    threshold = (np.uint64(0) - un) % un
    while True:
        r = _sm_next(sm)
        if r >= threshold:
            return np.int64(r % un)


@njit(cache=True)
def _pidx(n, a, b):
    if a > b:
        a, b = b, a
    return a * (2 * n - a - 1) // 2 + (b - a - 1)


@njit(cache=True)
def _decode(n, k):
    b = 2 * n - 1
    u = int((b - math.sqrt(b * b - 8.0 * k)) * 0.5)
    if u < 0:
        u = 0
    while u * (2 * n - u - 1) // 2 > k:
        u -= 1
    while (u + 1) * (2 * n - u - 2) // 2 <= k:
        u += 1
    v = k - u * (2 * n - u - 1) // 2 + u + 1
    return u, v


@njit(cache=True)
def _apply_yes(status, forbidden, adj, deg, k, u, v, n, counters):
    """Turn pair k = {u, v} into an edge and close newly blocked pairs.

    Closure uses the adjacency as it was before this edge: any open pair
    {w, v} with w ~ u (or {w, u} with w ~ v) now has a common neighbor.
    Caller guarantees adjacency capacity.
    """
    du = deg[u]
    dv = deg[v]
    for t in range(du):
        w = adj[u, t]
        kk = _pidx(n, w, v)
        if status[kk] == OPEN:
            status[kk] = CLOSED
            if not forbidden[kk]:
                counters[C_OPEN_NF] -= 1
    for t in range(dv):
        w = adj[v, t]
        kk = _pidx(n, w, u)
        if status[kk] == OPEN:
            status[kk] = CLOSED
            if not forbidden[kk]:
                counters[C_OPEN_NF] -= 1
    status[k] = EDGE
    adj[u, du] = v
    deg[u] = du + 1
    adj[v, dv] = u
    deg[v] = dv + 1


@njit(cache=True)
def run_planned(status, forbidden, adj, deg, k_arr, u_arr, v_arr, ans, n, counters, start):
    """Propose a pre-compiled pair list in order; every pair must be legal."""
    cap = adj.shape[1]
    for pos in range(start, k_arr.size):
        k = k_arr[pos]
        if forbidden[k]:
            return ERR_FORBIDDEN, pos
        if status[k] != OPEN:
            return ERR_CLOSED, pos
        a = ans[pos]
        if a:
            u = u_arr[pos]
            v = v_arr[pos]
            if deg[u] + 1 > cap or deg[v] + 1 > cap:
                return NEED_CAPACITY, pos
        forbidden[k] = True
        counters[C_OPEN_NF] -= 1
        counters[C_TURN] += 1
        if a:
            _apply_yes(status, forbidden, adj, deg, k, u_arr[pos], v_arr[pos], n, counters)
    return OK, k_arr.size


@njit(cache=True)
def run_sequence(status, forbidden, adj, deg, rem, ans, out_k, out_a, n, counters, pos):
    """Walk a fixed pair-index sequence, skipping pairs no longer legal.

    Answers are consumed only for actual proposals.  Proposed pairs and
    answers are appended to the out buffers for transcript recording.
    """
    cap = adj.shape[1]
    nans = ans.size
    nout = out_k.size
    while pos < rem.size:
        if counters[C_OPEN_NF] == 0:
            return TERMINAL, pos
        k = rem[pos]
        if status[k] != OPEN or forbidden[k]:
            pos += 1
            continue
        if counters[C_ANS] >= nans:
            return NEED_ANSWERS, pos
        if counters[C_OUT] >= nout:
            return OUT_FULL, pos
        a = ans[counters[C_ANS]]
        u = 0
        v = 0
        if a:
            u, v = _decode(n, k)
            if deg[u] + 1 > cap or deg[v] + 1 > cap:
                return NEED_CAPACITY, pos
        counters[C_ANS] += 1
        forbidden[k] = True
        counters[C_OPEN_NF] -= 1
        counters[C_TURN] += 1
        out_k[counters[C_OUT]] = k
        out_a[counters[C_OUT]] = a
        counters[C_OUT] += 1
        if a:
            _apply_yes(status, forbidden, adj, deg, k, u, v, n, counters)
        pos += 1
    return OK, pos


@njit(cache=True)
def run_uniform(status, forbidden, adj, deg, live, ans, out_k, out_a, n, counters, sm):
    """Per-turn uniform proposer against a precomputed answer stream.

    ``live`` is a lazily maintained superset of the legal pairs; stale
    (closed) entries are swap-removed when drawn, so each accepted draw is
    uniform over the current legal set.
    """
    cap = adj.shape[1]
    nans = ans.size
    nout = out_k.size
    L = counters[C_LIVE]
    while counters[C_OPEN_NF] > 0:
        if counters[C_ANS] >= nans:
            counters[C_LIVE] = L
            return NEED_ANSWERS, 0
        if counters[C_OUT] >= nout:
            counters[C_LIVE] = L
            return OUT_FULL, 0
        if counters[C_PEND_K] >= 0:
            j = counters[C_PEND_J]
            k = counters[C_PEND_K]
            counters[C_PEND_J] = -1
            counters[C_PEND_K] = -1
        else:
            while True:
                j = _sm_bounded(sm, L)
                k = np.int64(live[j])
                if status[k] == OPEN and not forbidden[k]:
                    break
                L -= 1
                live[j] = live[L]
        a = ans[counters[C_ANS]]
        u = 0
        v = 0
        if a:
            u, v = _decode(n, k)
            if deg[u] + 1 > cap or deg[v] + 1 > cap:
                counters[C_PEND_J] = j
                counters[C_PEND_K] = k
                counters[C_LIVE] = L
                return NEED_CAPACITY, 0
        counters[C_ANS] += 1
        forbidden[k] = True
        counters[C_OPEN_NF] -= 1
        counters[C_TURN] += 1
        out_k[counters[C_OUT]] = k
        out_a[counters[C_OUT]] = a
        counters[C_OUT] += 1
        L -= 1
        live[j] = live[L]
        if a:
            _apply_yes(status, forbidden, adj, deg, k, u, v, n, counters)
    counters[C_LIVE] = L
    return TERMINAL, 0


@njit(cache=True)
def greedy_min_degree(indptr, indices, n, order):
    """Min-degree greedy independent set on a CSR graph.

    Buckets of vertices keyed by current degree with head insertion;
    vertices enter their buckets in ``order`` (a permutation), which is
    what randomizes tie-breaking across repeats; degree updates move a
    vertex to its new bucket's head.  Returns a bool selection mask.
    """
    deg = np.empty(n, np.int64)
    for v in range(n):
        deg[v] = indptr[v + 1] - indptr[v]
    head = np.full(n, -1, np.int64)
    nxt = np.full(n, -1, np.int64)
    prv = np.full(n, -1, np.int64)
    for j in range(n - 1, -1, -1):
        v = order[j]
        d = deg[v]
        nxt[v] = head[d]
        if head[d] >= 0:
            prv[head[d]] = v
        prv[v] = -1
        head[d] = v
    alive = np.ones(n, np.bool_)
    selected = np.zeros(n, np.bool_)
    removed = np.empty(n, np.int64)
    remaining = n
    cur = 0
    while remaining > 0:
        while head[cur] < 0:
            cur += 1
        v = head[cur]
        selected[v] = True
        # collect v and its alive neighbors, unlink them all
        nrem = 0
        removed[nrem] = v
        nrem += 1
        for t in range(indptr[v], indptr[v + 1]):
            w = indices[t]
            if alive[w]:
                removed[nrem] = w
                nrem += 1
        for t in range(nrem):
            x = removed[t]
            alive[x] = False
            p = prv[x]
            nx = nxt[x]
            if p >= 0:
                nxt[p] = nx
            else:
                head[deg[x]] = nx
            if nx >= 0:
                prv[nx] = p
        remaining -= nrem
        # degree updates for surviving neighbors of removed vertices
        for t in range(nrem):
            x = removed[t]
            for s in range(indptr[x], indptr[x + 1]):
                y = indices[s]
                if not alive[y]:
                    continue
                p = prv[y]
                nx = nxt[y]
                if p >= 0:
                    nxt[p] = nx
                else:
                    head[deg[y]] = nx
                if nx >= 0:
                    prv[nx] = p
                d = deg[y] - 1
                deg[y] = d
                nxt[y] = head[d]
                if head[d] >= 0:
                    prv[head[d]] = y
                prv[y] = -1
                head[d] = y
                if d < cur:
                    cur = d
    return selected
