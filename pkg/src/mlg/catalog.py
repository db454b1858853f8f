"""The sixteen two-layer 3-node graphlet types and per-model state coefficients.

A pair of identities carries a colour code ``col = blue_bit | (red_bit << 1)``, so
0 = none, 1 = blue, 2 = red, 3 = blue+red. A triple is described by the colours of
its pairs (ab, bc, ac) and classified through a 64-entry lookup table.
"""

from __future__ import annotations

import enum
import itertools
from typing import NamedTuple

import numpy as np

from .graph import TwoLayerGraph

ALGORITHMS = ("rwnbn", "rwebe", "rwomrn", "rwmix", "rwnr")
RESTRICTED = ("rwnbn", "rwebe", "rwomrn", "rwmix")
NUM_TYPES = 16
RESTRICTED_TYPES = 14
DEGENERATE = 0


class PairColor(enum.IntEnum):
    NONE = 0
    BLUE = 1
    RED = 2
    BLUERED = 3


_ABBREV = {PairColor.BLUE: "B", PairColor.RED: "R", PairColor.BLUERED: "BR"}

_B, _R, _X = PairColor.BLUE, PairColor.RED, PairColor.BLUERED

# Paths keyed by the sorted colour pair of their two edges, triangles by the sorted triple.
_PATH_TYPES = {
    (_B, _B): 1,
    (_B, _R): 2,
    (_B, _X): 3,
    (_R, _X): 4,
    (_X, _X): 5,
    (_R, _R): 15,
}
_TRIANGLE_TYPES = {
    (_B, _B, _B): 6,
    (_B, _B, _R): 7,
    (_B, _R, _R): 8,
    (_B, _B, _X): 9,
    (_R, _R, _X): 10,
    (_B, _R, _X): 11,
    (_B, _X, _X): 12,
    (_R, _X, _X): 13,
    (_X, _X, _X): 14,
    (_R, _R, _R): 16,
}


class GraphletInfo(NamedTuple):
    index: int
    kind: str  # "path" or "triangle"
    colors: tuple[PairColor, ...]  # path: (end, center, end) edge colours; triangle: sorted multiset

    @property
    def label(self) -> str:
        names = [_ABBREV[c] for c in self.colors]
        if self.kind == "path":
            return "-".join(names) + " path"
        return "{" + ",".join(names) + "}"


GRAPHLETS: dict[int, GraphletInfo] = {}
for _cols, _i in _PATH_TYPES.items():
    GRAPHLETS[_i] = GraphletInfo(_i, "path", _cols)
for _cols, _i in _TRIANGLE_TYPES.items():
    GRAPHLETS[_i] = GraphletInfo(_i, "triangle", _cols)
GRAPHLETS = dict(sorted(GRAPHLETS.items()))


def classify_colors(c_ab: int, c_bc: int, c_ac: int) -> int:
    cols = tuple(sorted(PairColor(c) for c in (c_ab, c_bc, c_ac) if c))
    if len(cols) == 3:
        return _TRIANGLE_TYPES[cols]
    if len(cols) == 2:
        return _PATH_TYPES[cols]
    return DEGENERATE


def color_code(c_ab: int, c_bc: int, c_ac: int) -> int:
    return c_ab * 16 + c_bc * 4 + c_ac


TYPE_TABLE = np.zeros(64, dtype=np.int64)
for _ab, _bc, _ac in itertools.product(range(4), repeat=3):
    TYPE_TABLE[color_code(_ab, _bc, _ac)] = classify_colors(_ab, _bc, _ac)
TYPE_TABLE.setflags(write=False)


def pair_color(g: TwoLayerGraph, u: int, v: int) -> int:
    if u == v:
        return 0
    return int(g.has_blue_edge(u, v)) | (int(g.has_red_edge(u, v)) << 1)


def classify_triple(g: TwoLayerGraph, a: int, b: int, c: int) -> int:
    for x in (a, b, c):
        g._check(x)
    if a == b or b == c or a == c:
        return DEGENERATE
    return classify_colors(pair_color(g, a, b), pair_color(g, b, c), pair_color(g, a, c))


def state_identities(state) -> tuple[int, ...]:
    """Identity tuple of a walk state (node triple or edge pair)."""
    if hasattr(state, "e1"):
        ids = {state.e1[0], state.e1[1], state.e2[0], state.e2[1]}
        return tuple(sorted(ids))
    return tuple(state.nodes)


def classify_state(g: TwoLayerGraph, state) -> int:
    ids = state_identities(state)
    if len(ids) != 3:
        return DEGENERATE
    return classify_triple(g, *ids)


# -- isomorphic state coefficients ------------------------------------------

# Hop layer codes for node-triple states.
HOP_BLUE = 0
HOP_RED = 1


def _hop_ok(g: TwoLayerGraph, u: int, v: int, hop: int) -> bool:
    return g.has_blue_edge(u, v) if hop == HOP_BLUE else g.has_red_edge(u, v)


def _walkable(g: TwoLayerGraph, u: int) -> bool:
    return bool(g.in_blue[u] and g.blue_degree[u] > 0)


def state_is_legal(g: TwoLayerGraph, nodes: tuple[int, int, int], hops: tuple[int, int], model: str) -> bool:
    """Whether (nodes, hops) is a state the model's walk can occupy.

    Blue hops must start at blue-walkable identities. Restricted walks may make a
    red hop only from a blue-walked identity; the one-more-red models may make a
    second red hop from a red-sampled identity.
    """
    x0, x1, x2 = nodes
    h1, h2 = hops
    if not (_hop_ok(g, x0, x1, h1) and _hop_ok(g, x1, x2, h2)):
        return False
    if model == "rwnr":
        return True
    if model in ("rwnbn", "rwebe"):
        return h1 == HOP_BLUE and _walkable(g, x0) and _walkable(g, x1)
    if model in ("rwomrn", "rwmix"):
        if h1 == HOP_BLUE:
            return _walkable(g, x0) and _walkable(g, x1)
        return h2 == HOP_RED and _walkable(g, x0)
    raise ValueError(f"unknown model {model!r}")


def count_states_for_triple(g: TwoLayerGraph, triple: tuple[int, int, int], model: str) -> int:
    """Number of legal states of ``model`` whose identity set equals ``triple``.

    For node-triple models a state is an ordered triple plus the layer of each hop;
    an edge-pair state (e1 blue, e2 sharing one endpoint) maps one-to-one onto a
    node triple with a blue first hop, so RWEbE is counted through the same rule.
    """
    total = 0
    for perm in itertools.permutations(triple):
        for hops in itertools.product((HOP_BLUE, HOP_RED), repeat=2):
            if state_is_legal(g, perm, hops, model):
                total += 1
    return total


def scaffold_graph(index: int) -> TwoLayerGraph:
    """Graphlet ``index`` on identities {0,1,2}, each given a pendant blue neighbour.

    The pendants (3,4,5) make all three identities blue-walkable and present in
    both layers without adding any edge inside the triple.
    """
    info = GRAPHLETS[index]
    if info.kind == "path":
        pair_cols = {(0, 1): info.colors[0], (1, 2): info.colors[1]}
    else:
        pair_cols = {(0, 1): info.colors[0], (1, 2): info.colors[1], (0, 2): info.colors[2]}
    blue = [(i, i + 3) for i in range(3)]
    red = []
    for pair, col in pair_cols.items():
        if col & 1:
            blue.append(pair)
        if col & 2:
            red.append(pair)
    return TwoLayerGraph.from_edges(6, blue, red, red_nodes=range(6))


def _model_key(model: str) -> str:
    m = model.lower().replace("/", "")
    if m in ("rwomrnrwmix", "rwmixrwomrn"):
        return "rwomrn"
    if m not in ALGORITHMS:
        raise ValueError(f"unknown model {model!r}")
    return m


def compute_iso_coefficients(model: str) -> dict[int, int]:
    """α_i for i in 1..16 by exhaustive state enumeration on each scaffold."""
    key = _model_key(model)
    return {i: count_states_for_triple(scaffold_graph(i), (0, 1, 2), key) for i in GRAPHLETS}


def alpha_array(model: str) -> np.ndarray:
    """Length-17 array indexed by type (slot 0 is the degenerate marker, always 0)."""
    coeffs = compute_iso_coefficients(model)
    out = np.zeros(NUM_TYPES + 1, dtype=np.int64)
    for i, a in coeffs.items():
        out[i] = a
    return out


def catalog_rows(models=ALGORITHMS) -> list[dict]:
    tables = {m: compute_iso_coefficients(m) for m in models}
    rows = []
    for i, info in GRAPHLETS.items():
        rows.append({"type": i, "structure": info.label, "alpha": {m: tables[m][i] for m in models}})
    return rows


def enumerate_colorings() -> list[tuple[int, int, int]]:
    """All connected colourings of the three pair positions, one per isomorphism class.

    Independent of the canonical tables: classes are formed by closing each
    colouring under the six vertex permutations.
    """
    pairs = [(0, 1), (1, 2), (0, 2)]
    seen = set()
    reps = []
    for cols in itertools.product(range(4), repeat=3):
        edges = [p for p, c in zip(pairs, cols) if c]
        if len(edges) < 2:
            continue
        if cols in seen:
            continue
        orbit = set()
        for perm in itertools.permutations(range(3)):
            m = {}
            for (u, v), c in zip(pairs, cols):
                pu, pv = perm[u], perm[v]
                m[(min(pu, pv), max(pu, pv))] = c
            orbit.add(tuple(m[p] for p in pairs))
        seen |= orbit
        reps.append(cols)
    return reps
