"""Exact 3-node CIS counts, normalising constants and bound diagnostics."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba as nb
import numpy as np

from ..catalog import NUM_TYPES, RESTRICTED_TYPES, TYPE_TABLE, alpha_array, classify_colors
from ..graph import TwoLayerGraph


@dataclass
class GroundTruth:
    counts: np.ndarray  # length 16, index 0 -> type 1

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def concentrations(self, types: str = "restricted") -> np.ndarray:
        """``d_i`` over types 1..14 (``"restricted"``) or 1..16 (``"all"``)."""
        k = RESTRICTED_TYPES if types == "restricted" else NUM_TYPES
        c = self.counts[:k].astype(float)
        s = c.sum()
        return c / s if s > 0 else np.zeros(k)

    def to_json(self) -> dict:
        return {
            "counts": [int(x) for x in self.counts],
            "total": self.total,
            "concentrations": self.concentrations("all").tolist(),
            "concentrations_1_14": self.concentrations("restricted").tolist(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "GroundTruth":
        return cls(np.asarray(data["counts"], dtype=np.int64))


def union_csr(g: TwoLayerGraph) -> tuple[np.ndarray, np.ndarray]:
    e = np.concatenate([g.blue_edges(), g.red_edges()])
    if len(e):
        e = np.unique(e, axis=0)
    src = np.concatenate([e[:, 0], e[:, 1]]) if len(e) else np.zeros(0, np.int64)
    dst = np.concatenate([e[:, 1], e[:, 0]]) if len(e) else np.zeros(0, np.int64)
    order = np.lexsort((dst, src))
    indptr = np.zeros(g.num_identities + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=g.num_identities), out=indptr[1:])
    return indptr, np.ascontiguousarray(dst[order], dtype=np.int64)


@nb.njit(cache=True, nogil=True)
def _member(ptr, idx, u, v):
    lo = ptr[u]
    hi = ptr[u + 1]
    while lo < hi:
        mid = (lo + hi) >> 1
        if idx[mid] < v:
            lo = mid + 1
        elif idx[mid] > v:
            hi = mid
        else:
            return 1
    return 0


@nb.njit(cache=True, nogil=True)
def _wedge_counts(lo, hi, uptr, uidx, bptr, bidx, rptr, ridx, table, out):
    # out[t] accumulates paths once (at their centre) and triangles three times
    for v in range(lo, hi):
        s = uptr[v]
        e = uptr[v + 1]
        for i in range(s, e):
            x = uidx[i]
            cxv = _member(bptr, bidx, x, v) | (_member(rptr, ridx, x, v) << 1)
            for j in range(i + 1, e):
                y = uidx[j]
                cvy = _member(bptr, bidx, v, y) | (_member(rptr, ridx, v, y) << 1)
                cxy = _member(bptr, bidx, x, y) | (_member(rptr, ridx, x, y) << 1)
                out[table[cxv * 16 + cvy * 4 + cxy]] += 1


_TRIANGLE = np.array([0] + [1 if i in (6, 7, 8, 9, 10, 11, 12, 13, 14, 16) else 0 for i in range(1, 17)])


def count_exact(g: TwoLayerGraph, threads: int = 1) -> GroundTruth:
    """Every connected 3-identity subset of the union graph, classified once."""
    uptr, uidx = union_csr(g)
    arrays = (
        uptr,
        uidx,
        np.ascontiguousarray(g.blue_indptr, dtype=np.int64),
        np.ascontiguousarray(g.blue_indices, dtype=np.int64),
        np.ascontiguousarray(g.red_indptr, dtype=np.int64),
        np.ascontiguousarray(g.red_indices, dtype=np.int64),
        np.ascontiguousarray(TYPE_TABLE, dtype=np.int64),
    )
    n = g.num_identities
    threads = max(1, int(threads))
    bounds = np.linspace(0, n, threads + 1).astype(np.int64)
    parts = [np.zeros(NUM_TYPES + 1, dtype=np.int64) for _ in range(threads)]

    def work(k):
        _wedge_counts(bounds[k], bounds[k + 1], *arrays, parts[k])

    if threads == 1:
        work(0)
    else:
        with ThreadPoolExecutor(threads) as ex:
            list(ex.map(work, range(threads)))
    raw = np.sum(parts, axis=0)
    tri = _TRIANGLE.astype(bool)
    if np.any(raw[tri] % 3):
        raise AssertionError("triangle wedge count not divisible by 3")
    raw[tri] //= 3
    return GroundTruth(raw[1:].astype(np.int64))


def naive_count(g: TwoLayerGraph) -> GroundTruth:
    """O(N^3) scan over all identity triples."""
    blue, red = g.blue_sets(), g.red_sets()
    counts = np.zeros(NUM_TYPES + 1, dtype=np.int64)

    def col(u, v):
        return (1 if v in blue[u] else 0) | (2 if v in red[u] else 0)

    for a, b, c in itertools.combinations(range(g.num_identities), 3):
        counts[classify_colors(col(a, b), col(b, c), col(a, c))] += 1
    return GroundTruth(counts[1:])


# -- normalising constants ------------------------------------------------


def _edge_counts(g: TwoLayerGraph) -> tuple[np.ndarray, np.ndarray]:
    """``b(e)`` and ``r(e)`` for every blue edge."""
    e = g.blue_edges()
    if len(e) == 0:
        return np.zeros(0), np.zeros(0)
    u, v = e[:, 0], e[:, 1]
    shared = np.array([g.has_red_edge(int(a), int(b)) for a, b in e], dtype=np.int64)
    be = g.blue_degree[u] + g.blue_degree[v] - 2
    re = g.red_degree[u] + g.red_degree[v] - 2 * shared
    return be.astype(float), re.astype(float)


def _ratio(num, den):
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    return np.divide(num, den, out=np.zeros_like(num), where=den > 0)


def compute_M(g: TwoLayerGraph, algo: str, formula: str = "exact") -> float:
    """Sum of stationary weights over the state space.

    ``formula="closed"`` returns the alternative closed forms instead, which differ
    from the state-space sum for the one-more-red-node walk and the edge walk.
    """
    b = np.where(g.in_blue, g.blue_degree, 0).astype(float)
    r = g.red_degree.astype(float)
    EB = g.num_blue_edges
    br = float(_ratio(b * r, b + r).sum())
    if algo == "rwnbn":
        return 2 * EB + br
    if algo == "rwomrn":
        if formula == "closed":
            return float(_ratio(b * b - b - r + 3 * b * r, b + r).sum())
        return 2 * EB + 2 * br
    if algo == "rwmix":
        extra = 0.0
        for v in np.flatnonzero((b > 0) & (r > 0)):
            ry = r[g.red_neighbors(int(v))]
            extra += float(np.sum(b[v] * ry / ((b[v] + r[v]) * (ry + b[v]))))
        return 2 * EB + br + extra
    if algo == "rwebe":
        if formula == "closed":
            return 2 * EB + br
        be, re = _edge_counts(g)
        return float(be.sum() + _ratio(be * re, be + re).sum())
    if algo == "rwnr":
        return 2.0 * (EB + g.num_red_edges)
    raise ValueError(f"unknown algorithm {algo!r}")


def min_stationary_weight(g: TwoLayerGraph, algo: str) -> float:
    """Smallest ``π̃(S)`` over the state space, from degree data only."""
    b = np.where(g.in_blue, g.blue_degree, 0).astype(float)
    r = g.red_degree.astype(float)
    walk = b > 0
    cands = []
    if algo == "rwnr":
        d = (g.blue_degree + r)[(g.blue_degree + r) > 0]
        return float(1.0 / d.max())
    if algo == "rwebe":
        be, re = _edge_counts(g)
        cands.append(1.0)
        has = (be > 0) & (re > 0)
        if has.any():
            cands.append(float((be[has] / (be[has] + re[has])).min()))
        return min(cands)
    cands.append(float((1.0 / b[walk]).min()))
    m = walk & (r > 0)
    if m.any():
        cands.append(float((1.0 / (b[m] + r[m])).min()))
    if algo in ("rwomrn", "rwmix"):
        for x in np.flatnonzero(m):
            ry = r[g.red_neighbors(int(x))]
            tail = ry if algo == "rwomrn" else ry + b[x]
            cands.append(float((b[x] / ((b[x] + r[x]) * tail)).min()))
    return min(cands)


def bound_diagnostics(g: TwoLayerGraph, algo: str, truth: GroundTruth, chain=None) -> dict:
    """Graph-dependent factors of the sample-size bound.

    ``H = max 1/π(S) = M / min π̃``. ``Λ_i = min(α_i |C_i|, α_min |C|)`` with
    ``α_min`` over types 1..14; the ``*_present`` variants take the minimum only
    over types that occur in the graph.
    """
    M = compute_M(g, algo)
    H = M / min_stationary_weight(g, algo)
    alpha = alpha_array(algo)[1 : RESTRICTED_TYPES + 1].astype(float)
    counts = truth.counts[:RESTRICTED_TYPES].astype(float)
    total = float(counts.sum())
    a_min = float(alpha.min())
    present = counts > 0
    a_min_p = float(alpha[present].min()) if present.any() else math.nan
    lam = np.minimum(alpha * counts, a_min * total)
    lam_p = np.minimum(alpha * counts, a_min_p * total)

    def hard(lv):
        return [H / x if x > 0 else None for x in lv]

    rep = {
        "algo": algo,
        "M": M,
        "H": H,
        "alpha_min": a_min,
        "alpha_min_present": a_min_p,
        "Lambda": lam.tolist(),
        "Lambda_present": lam_p.tolist(),
        "hardness": hard(lam),
        "hardness_present": hard(lam_p),
        "tau": None,
        "xi": "not computed",
        "phi_norm": "not computed",
    }
    if chain is not None:
        rep["tau"] = chain.tau
        rep["chain_states"] = len(chain.states)
    return rep
