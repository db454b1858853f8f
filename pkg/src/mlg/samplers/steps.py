"""Reference step functions that go through the access facade.

Every random choice is one draw from a :class:`UniformStream`, in a fixed order,
so the compiled kernel reproduces these trajectories draw for draw.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..access import RestrictedAccess, UniformStream, UnrestrictedAccess
from ..graph import TwoLayerGraph
from .states import B, R, EdgePair, NodeTriple


class DeadEndError(RuntimeError):
    """The walk reached a state with no legal continuation."""


def _nth_skipping(nb: np.ndarray, j: int, skip: int) -> int:
    # j-th element of a sorted list with one value removed
    k = int(np.searchsorted(nb, skip))
    if k < len(nb) and nb[k] == skip and j >= k:
        j += 1
    return int(nb[j])


def _blue_or_red_from(state_nodes, c, facade, rng, prev_hop=B):
    b = state_nodes[1]
    nb, bc, rc = facade.blue_neighbors(c)
    k = bc + rc
    if k == 0:
        raise DeadEndError(f"identity {c} has no neighbours")
    i = rng.index(k)
    if i < bc:
        return NodeTriple((b, c, int(nb[i])), (prev_hop, B))
    y = facade.sample_red_neighbor(c, rng)
    return NodeTriple((b, c, y), (prev_hop, R))


def step_rwnbn(state: NodeTriple, facade: RestrictedAccess, rng: UniformStream) -> NodeTriple:
    a, b, c = state.nodes
    if state.hops == (B, B):
        return _blue_or_red_from(state.nodes, c, facade, rng)
    if state.hops == (B, R):
        nb, bb, _ = facade.blue_neighbors(b)
        return NodeTriple((a, b, int(nb[rng.index(bb)])), (B, B))
    raise ValueError(f"invalid node-by-node state {state}")


def _recentre(state: NodeTriple, facade, rng) -> NodeTriple:
    x = state.nodes[0]
    nb, bx, _ = facade.blue_neighbors(x)
    if bx == 0:
        raise DeadEndError(f"identity {x} has no blue neighbour")
    p = int(nb[rng.index(bx)])
    q = int(nb[rng.index(bx)])
    return NodeTriple((p, x, q), (B, B))


def step_rwomrn(state: NodeTriple, facade: RestrictedAccess, rng: UniformStream) -> NodeTriple:
    a, b, y = state.nodes
    if state.hops == (B, B):
        return _blue_or_red_from(state.nodes, y, facade, rng)
    if state.hops == (B, R):
        nb, ry = facade.red_neighbors_of_red(y)
        return NodeTriple((b, y, int(nb[rng.index(ry)])), (R, R))
    if state.hops == (R, R):
        return _recentre(state, facade, rng)
    raise ValueError(f"invalid state {state}")


def step_rwmix(state: NodeTriple, facade: RestrictedAccess, rng: UniformStream) -> NodeTriple:
    a, b, y = state.nodes
    if state.hops == (B, B):
        return _blue_or_red_from(state.nodes, y, facade, rng)
    if state.hops == (B, R):
        nbb, bb, _ = facade.blue_neighbors(b)
        nby, ry = facade.red_neighbors_of_red(y)
        i = rng.index(bb + ry)
        if i < bb:
            return NodeTriple((a, b, int(nbb[i])), (B, B))
        return NodeTriple((b, y, int(nby[i - bb])), (R, R))
    if state.hops == (R, R):
        return _recentre(state, facade, rng)
    raise ValueError(f"invalid state {state}")


def step_rwnr(state: NodeTriple, facade: UnrestrictedAccess, rng: UniformStream) -> NodeTriple:
    _, b, c = state.nodes
    nb, bc, rc = facade.blue_neighbors(c)
    k = bc + rc
    if k == 0:
        raise DeadEndError(f"identity {c} is isolated")
    i = rng.index(k)
    if i < bc:
        return NodeTriple((b, c, int(nb[i])), (state.hops[1], B))
    red = facade.red_neighbors(c)
    return NodeTriple((b, c, int(red[i - bc])), (state.hops[1], R))


def step_rwebe(state: EdgePair, facade: RestrictedAccess, rng: UniformStream) -> EdgePair:
    a, b, c = state.nodes()
    if state.kind == 0:
        nbb, bb, rb = facade.blue_neighbors(b)
        nbc, bc, rc = facade.blue_neighbors(c)
        shared = int(facade.has_red_edge(b, c)) if rb and rc else 0
        kb, kc = bb - 1, bc - 1
        rb, rc = rb - shared, rc - shared
        k = kb + kc + rb + rc
        if k == 0:
            raise DeadEndError(f"edge ({b},{c}) has no neighbouring edge")
        i = rng.index(k)
        if i < kb:
            return EdgePair.from_nodes(c, b, _nth_skipping(nbb, i, c))
        i -= kb
        if i < kc:
            return EdgePair.from_nodes(b, c, _nth_skipping(nbc, i, b))
        i -= kc
        if i < rb:
            return EdgePair.from_nodes(c, b, facade.sample_red_neighbor(b, rng, exclude=c), red=True)
        return EdgePair.from_nodes(b, c, facade.sample_red_neighbor(c, rng, exclude=b), red=True)
    nba, ba, _ = facade.blue_neighbors(a)
    nbb, bb, _ = facade.blue_neighbors(b)
    ka, kb = ba - 1, bb - 1
    if ka + kb == 0:
        raise DeadEndError(f"edge ({a},{b}) has no blue neighbour")
    i = rng.index(ka + kb)
    if i < ka:
        return EdgePair.from_nodes(b, a, _nth_skipping(nba, i, b))
    return EdgePair.from_nodes(a, b, _nth_skipping(nbb, i - ka, a))


STEP_FUNCTIONS = {
    "rwnbn": step_rwnbn,
    "rwebe": step_rwebe,
    "rwomrn": step_rwomrn,
    "rwmix": step_rwmix,
    "rwnr": step_rwnr,
}


def make_facade(g: TwoLayerGraph, algo: str):
    if algo == "rwnr":
        return UnrestrictedAccess(g)
    return RestrictedAccess(g, red_hop_budget=2 if algo in ("rwomrn", "rwmix") else 1)


def stationary_weight(g: TwoLayerGraph, state, algo: str) -> Fraction:
    """Unnormalised stationary weight from local degrees only."""
    bd, rd = g.blue_degree, g.red_degree
    if algo == "rwebe":
        if state.kind == 0:
            return Fraction(1)
        a, b, _ = state.nodes()
        be = int(bd[a] + bd[b] - 2)
        re = int(rd[a] + rd[b] - 2 * g.has_red_edge(a, b))
        return Fraction(be, be + re)
    x0, x1, _ = state.nodes
    if algo == "rwnr":
        return Fraction(1, int(bd[x1] + rd[x1]))
    if state.hops == (B, B):
        return Fraction(1, int(bd[x1]))
    if state.hops == (B, R):
        return Fraction(1, int(bd[x1] + rd[x1]))
    if state.hops == (R, R) and algo in ("rwomrn", "rwmix"):
        bx, rx, ry = int(bd[x0]), int(rd[x0]), int(rd[x1])
        tail = ry if algo == "rwomrn" else ry + bx
        return Fraction(bx, (bx + rx) * tail)
    raise ValueError(f"state {state} is not valid for {algo}")


def initial_state(g: TwoLayerGraph, algo: str, rng: UniformStream, facade=None):
    """Uniform over all-blue states with three distinct identities.

    The centre is drawn with probability proportional to ``b(b-1)``, then two
    distinct blue neighbours.
    """
    bd = np.where(g.in_blue, g.blue_degree, 0).astype(np.int64)
    w = bd * (bd - 1)
    cum = np.cumsum(w)
    total = int(cum[-1]) if len(cum) else 0
    if total == 0:
        raise DeadEndError("no identity has two blue neighbours; cannot start a walk")
    t = int(rng.next() * total)
    centre = int(np.searchsorted(cum, min(t, total - 1), side="right"))
    nb = g.blue_neighbors(centre)
    k = len(nb)
    i = rng.index(k)
    j = rng.index(k - 1)
    if j >= i:
        j += 1
    a, c = int(nb[i]), int(nb[j])
    if facade is not None:
        facade.seed(centre)
        facade.blue_neighbors(centre)
    if algo == "rwebe":
        return EdgePair.from_nodes(a, centre, c)
    return NodeTriple((a, centre, c), (B, B))
