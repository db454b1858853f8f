"""Explicit Markov chains of the walks on small graphs.

The transition rule here is written from the walk definitions directly, as
probabilities rather than random draws, so it checks the step functions and the
stationary weights independently.
"""

from __future__ import annotations

import math
from collections import defaultdict, deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..graph import TwoLayerGraph

Row = tuple  # (x0, x1, x2, h1, h2)


class ChainTooLarge(RuntimeError):
    pass


def _bl(g, u):
    return [int(x) for x in g.blue_neighbors(u)]


def _rd(g, u):
    return [int(x) for x in g.red_neighbors(u)]


def transitions(g: TwoLayerGraph, s: Row, algo: str) -> dict[Row, Fraction]:
    x0, x1, x2, h1, h2 = s
    out: dict[Row, Fraction] = defaultdict(Fraction)
    if algo == "rwebe":
        a, b, c = x0, x1, x2
        if h2 == 0:
            moves = [((c, b, d, 0, 0)) for d in _bl(g, b) if d != c]
            moves += [((b, c, d, 0, 0)) for d in _bl(g, c) if d != b]
            moves += [((c, b, y, 0, 1)) for y in _rd(g, b) if y != c]
            moves += [((b, c, y, 0, 1)) for y in _rd(g, c) if y != b]
        else:
            moves = [((b, a, d, 0, 0)) for d in _bl(g, a) if d != b]
            moves += [((a, b, d, 0, 0)) for d in _bl(g, b) if d != a]
        for m in moves:
            out[m] += Fraction(1, len(moves))
        return dict(out)
    if algo == "rwnr":
        moves = [(x1, x2, d, h2, 0) for d in _bl(g, x2)] + [(x1, x2, d, h2, 1) for d in _rd(g, x2)]
        for m in moves:
            out[m] += Fraction(1, len(moves))
        return dict(out)
    if (h1, h2) == (0, 0):
        moves = [(x1, x2, d, 0, 0) for d in _bl(g, x2)] + [(x1, x2, y, 0, 1) for y in _rd(g, x2)]
        for m in moves:
            out[m] += Fraction(1, len(moves))
    elif (h1, h2) == (0, 1):
        blue = [(x0, x1, d, 0, 0) for d in _bl(g, x1)]
        red = [(x1, x2, z, 1, 1) for z in _rd(g, x2)]
        moves = {"rwnbn": blue, "rwomrn": red, "rwmix": blue + red}[algo]
        for m in moves:
            out[m] += Fraction(1, len(moves))
    elif (h1, h2) == (1, 1) and algo in ("rwomrn", "rwmix"):
        nb = _bl(g, x0)
        p = Fraction(1, len(nb) ** 2)
        for u in nb:
            for w in nb:
                out[(u, x0, w, 0, 0)] += p
    else:
        raise ValueError(f"state {s} invalid for {algo}")
    return dict(out)


def start_states(g: TwoLayerGraph, algo: str) -> list[Row]:
    """All-blue states with three distinct identities."""
    res = []
    for b in range(g.num_identities):
        if not g.in_blue[b]:
            continue
        nb = _bl(g, b)
        for a in nb:
            for c in nb:
                if a != c:
                    res.append((a, b, c, 0, 0))
    return res


def stationary_weight_exact(g: TwoLayerGraph, s: Row, algo: str) -> Fraction:
    from ..samplers.states import state_from_row
    from ..samplers.steps import stationary_weight

    return stationary_weight(g, state_from_row(algo, s), algo)


@dataclass
class ExplicitChain:
    algo: str
    states: list[Row]
    P: sp.csr_matrix
    pi: np.ndarray
    rows_exact: list[dict[int, Fraction]] | None
    tau: int | None
    period: int

    def index(self) -> dict[Row, int]:
        return {s: i for i, s in enumerate(self.states)}


def _period(states: list[Row], rows: list[dict[int, Fraction]]) -> int:
    # gcd of level differences along edges of a BFS tree
    level = {0: 0}
    q = deque([0])
    g = 0
    while q:
        i = q.popleft()
        for j in rows[i]:
            if j not in level:
                level[j] = level[i] + 1
                q.append(j)
            else:
                g = math.gcd(g, level[i] + 1 - level[j])
    return g if g else 1


def solve_stationary(P: sp.csr_matrix) -> np.ndarray:
    n = P.shape[0]
    A = (P.T - sp.identity(n, format="csr")).tolil()
    A[n - 1, :] = np.ones(n)
    rhs = np.zeros(n)
    rhs[n - 1] = 1.0
    pi = spla.spsolve(A.tocsc(), rhs)
    return np.asarray(pi)


def mixing_time(P: sp.csr_matrix, pi: np.ndarray, zeta: float = 0.125, max_t: int = 5000) -> int | None:
    """Smallest t with max over starts of TV(P^t(s,.), pi) <= zeta."""
    n = P.shape[0]
    D = np.eye(n)
    PT = P.T.tocsr()
    for t in range(1, max_t + 1):
        D = (PT @ D.T).T
        tv = 0.5 * np.abs(D - pi[None, :]).sum(axis=1).max()
        if tv <= zeta:
            return t
    return None


def build_explicit_chain(
    g: TwoLayerGraph,
    algo: str,
    cap: int = 5000,
    exact: bool = True,
    with_tau: bool = True,
    tau_cap: int = 1500,
) -> ExplicitChain:
    """Enumerate reachable states from the all-blue starts and solve for π."""
    starts = start_states(g, algo)
    if not starts:
        raise ValueError("graph has no all-blue state with three distinct identities")
    idx: dict[Row, int] = {}
    states: list[Row] = []
    rows: list[dict[int, Fraction]] = []
    q = deque()
    for s in starts:
        if s not in idx:
            idx[s] = len(states)
            states.append(s)
            q.append(s)
    trans = {}
    while q:
        s = q.popleft()
        t = transitions(g, s, algo)
        trans[s] = t
        for nxt in t:
            if nxt not in idx:
                idx[nxt] = len(states)
                states.append(nxt)
                if len(states) > cap:
                    raise ChainTooLarge(f"{algo} chain exceeds {cap} states")
                q.append(nxt)
    for s in states:
        rows.append({idx[k]: v for k, v in trans[s].items()})
    r_i, c_i, vals = [], [], []
    for i, row in enumerate(rows):
        for j, p in row.items():
            r_i.append(i)
            c_i.append(j)
            vals.append(float(p))
    n = len(states)
    P = sp.csr_matrix((vals, (r_i, c_i)), shape=(n, n))
    pi = solve_stationary(P)
    period = _period(states, rows)
    tau = None
    if with_tau and period == 1 and n <= tau_cap:
        tau = mixing_time(P, pi)
    return ExplicitChain(algo, states, P, pi, rows if exact else None, tau, period)


def exact_row_sums(chain: ExplicitChain) -> list[Fraction]:
    return [sum(row.values(), Fraction(0)) for row in chain.rows_exact]


def exact_balance_residual(g: TwoLayerGraph, chain: ExplicitChain) -> Fraction:
    """max_S |(π̃ P)(S) − π̃(S)| in rational arithmetic."""
    w = [stationary_weight_exact(g, s, chain.algo) for s in chain.states]
    inflow = [Fraction(0)] * len(w)
    for i, row in enumerate(chain.rows_exact):
        for j, p in row.items():
            inflow[j] += w[i] * p
    return max(abs(a - b) for a, b in zip(inflow, w))


def node_walk_inflow_check(g: TwoLayerGraph, M: Fraction | None = None) -> int:
    """Check the two inflow identities of the node-by-node walk for every state.

    π(x, y, Y) = Σ_{a∈B(x)} π(a, x, y) / (r_y + b_y) and
    π(x, y, z) = Σ_{a∈B(x)} π(a, x, y) / (r_y + b_y) + Σ_{q∈R(y)} π(x, y, q) / b_y,
    with π = π̃ / M. Returns the number of identities verified; raises on failure.
    """
    bd = [int(x) for x in g.blue_degree]
    rd = [int(x) for x in g.red_degree]
    if M is None:
        M = 2 * g.num_blue_edges + sum(
            (Fraction(bd[v] * rd[v], bd[v] + rd[v]) for v in range(g.num_identities) if g.in_blue[v] and bd[v] + rd[v]),
            Fraction(0),
        )

    def pi_bbb(a, x, y):
        return Fraction(1, bd[x]) / M

    def pi_bbr(x, y, q):
        return Fraction(1, bd[y] + rd[y]) / M

    checked = 0
    total = Fraction(0)
    for y in range(g.num_identities):
        if not g.in_blue[y] or bd[y] == 0:
            continue
        for x in _bl(g, y):
            inflow = sum((pi_bbb(a, x, y) for a in _bl(g, x)), Fraction(0)) / (rd[y] + bd[y])
            for yy in _rd(g, y):
                if pi_bbr(x, y, yy) != inflow:
                    raise AssertionError(f"red inflow identity fails at {(x, y, yy)}")
                total += pi_bbr(x, y, yy)
                checked += 1
            for z in _bl(g, y):
                rhs = inflow + sum((pi_bbr(x, y, q) for q in _rd(g, y)), Fraction(0)) / bd[y]
                if pi_bbb(x, y, z) != rhs:
                    raise AssertionError(f"blue inflow identity fails at {(x, y, z)}")
                total += pi_bbb(x, y, z)
                checked += 1
    if total != 1:
        raise AssertionError(f"stationary probabilities sum to {total}, not 1")
    return checked
