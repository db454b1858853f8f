"""Two-layer multiplex graph with identity-level coupling.

Identities are dense integers in ``[0, N)``. An identity that is present in both
layers stands for the collapsed inter-layer pair, so inter-layer edges are never
stored. Adjacency is kept in CSR form (sorted neighbour lists) per layer.
"""

from __future__ import annotations

import enum
import os
from typing import Iterable, NamedTuple

import numpy as np


class Layer(enum.IntEnum):
    BLUE = 0
    RED = 1


class GraphFormatError(ValueError):
    """Malformed mlx input or a violated graph invariant."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class EdgeRef(NamedTuple):
    u: int
    v: int
    layer: Layer

    @classmethod
    def make(cls, u: int, v: int, layer: Layer) -> "EdgeRef":
        return cls(u, v, layer) if u < v else cls(v, u, layer)


def _csr(n: int, edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if edges.size == 0:
        return np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64)
    src = np.concatenate([edges[:, 0], edges[:, 1]])
    dst = np.concatenate([edges[:, 1], edges[:, 0]])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    counts = np.bincount(src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, dst.astype(np.int64)


def _canonical_edges(n: int, edges, layer_name: str) -> np.ndarray:
    arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
    if arr.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    arr = arr.reshape(-1, 2)
    if np.any(arr < 0) or np.any(arr >= n):
        bad = arr[(arr < 0).any(axis=1) | (arr >= n).any(axis=1)][0]
        raise GraphFormatError(f"{layer_name} edge {tuple(bad)} has an id outside [0, {n})")
    if np.any(arr[:, 0] == arr[:, 1]):
        bad = arr[arr[:, 0] == arr[:, 1]][0]
        raise GraphFormatError(f"{layer_name} self-loop at {bad[0]}")
    arr = np.sort(arr, axis=1)
    uniq = np.unique(arr, axis=0)
    if len(uniq) != len(arr):
        raise GraphFormatError(f"duplicate {layer_name} edge")
    return uniq


class TwoLayerGraph:
    """Immutable two-layer graph.

    Build with :meth:`from_edges`. ``blue_degree``/``red_degree`` are the per-identity
    layer degrees (``b_u`` and ``r_u``).
    """

    __slots__ = (
        "num_identities",
        "blue_indptr",
        "blue_indices",
        "red_indptr",
        "red_indices",
        "in_blue",
        "in_red",
        "blue_degree",
        "red_degree",
        "_blue_sets",
        "_red_sets",
    )

    def __init__(self, num_identities, blue_indptr, blue_indices, red_indptr, red_indices, in_blue, in_red):
        self.num_identities = int(num_identities)
        self.blue_indptr = blue_indptr
        self.blue_indices = blue_indices
        self.red_indptr = red_indptr
        self.red_indices = red_indices
        self.in_blue = in_blue
        self.in_red = in_red
        self.blue_degree = np.diff(blue_indptr)
        self.red_degree = np.diff(red_indptr)
        self._blue_sets = None
        self._red_sets = None
        for arr in (blue_indptr, blue_indices, red_indptr, red_indices, in_blue, in_red):
            arr.setflags(write=False)

    @classmethod
    def from_edges(
        cls,
        num_identities: int,
        blue_edges: Iterable[tuple[int, int]] = (),
        red_edges: Iterable[tuple[int, int]] = (),
        blue_nodes: Iterable[int] = (),
        red_nodes: Iterable[int] = (),
    ) -> "TwoLayerGraph":
        n = int(num_identities)
        if n < 0:
            raise GraphFormatError("negative identity count")
        eb = _canonical_edges(n, blue_edges, "blue")
        er = _canonical_edges(n, red_edges, "red")
        in_blue = np.zeros(n, dtype=bool)
        in_red = np.zeros(n, dtype=bool)
        for name, mask, extra in (("blue", in_blue, blue_nodes), ("red", in_red, red_nodes)):
            extra = np.asarray(list(extra), dtype=np.int64)
            if extra.size and (extra.min() < 0 or extra.max() >= n):
                raise GraphFormatError(f"{name} presence id outside [0, {n})")
            mask[extra] = True
        in_blue[eb.ravel()] = True
        in_red[er.ravel()] = True
        bptr, bidx = _csr(n, eb)
        rptr, ridx = _csr(n, er)
        return cls(n, bptr, bidx, rptr, ridx, in_blue, in_red)

    # -- basic queries -------------------------------------------------

    def blue_neighbors(self, u: int) -> np.ndarray:
        return self.blue_indices[self.blue_indptr[u] : self.blue_indptr[u + 1]]

    def red_neighbors(self, u: int) -> np.ndarray:
        return self.red_indices[self.red_indptr[u] : self.red_indptr[u + 1]]

    def _check(self, u: int) -> None:
        if not 0 <= u < self.num_identities:
            raise KeyError(f"unknown identity {u}")

    def has_blue_edge(self, u: int, v: int) -> bool:
        nb = self.blue_neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < len(nb) and nb[i] == v)

    def has_red_edge(self, u: int, v: int) -> bool:
        nb = self.red_neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < len(nb) and nb[i] == v)

    def blue_sets(self) -> list[frozenset]:
        if self._blue_sets is None:
            self._blue_sets = [frozenset(self.blue_neighbors(u).tolist()) for u in range(self.num_identities)]
        return self._blue_sets

    def red_sets(self) -> list[frozenset]:
        if self._red_sets is None:
            self._red_sets = [frozenset(self.red_neighbors(u).tolist()) for u in range(self.num_identities)]
        return self._red_sets

    @property
    def num_blue_edges(self) -> int:
        return len(self.blue_indices) // 2

    @property
    def num_red_edges(self) -> int:
        return len(self.red_indices) // 2

    def blue_edges(self) -> np.ndarray:
        src = np.repeat(np.arange(self.num_identities), self.blue_degree)
        mask = src < self.blue_indices
        return np.stack([src[mask], self.blue_indices[mask]], axis=1)

    def red_edges(self) -> np.ndarray:
        src = np.repeat(np.arange(self.num_identities), self.red_degree)
        mask = src < self.red_indices
        return np.stack([src[mask], self.red_indices[mask]], axis=1)

    def walkable(self) -> np.ndarray:
        """Identities a blue walk can stand on: blue-present with at least one blue edge."""
        return self.in_blue & (self.blue_degree > 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TwoLayerGraph):
            return NotImplemented
        return (
            self.num_identities == other.num_identities
            and np.array_equal(self.blue_indptr, other.blue_indptr)
            and np.array_equal(self.blue_indices, other.blue_indices)
            and np.array_equal(self.red_indptr, other.red_indptr)
            and np.array_equal(self.red_indices, other.red_indices)
            and np.array_equal(self.in_blue, other.in_blue)
            and np.array_equal(self.in_red, other.in_red)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return (
            f"TwoLayerGraph(N={self.num_identities}, |V_B|={int(self.in_blue.sum())}, "
            f"|V_R|={int(self.in_red.sum())}, |E_B|={self.num_blue_edges}, |E_R|={self.num_red_edges})"
        )


def edge_blue_neighbor_count(g: TwoLayerGraph, u: int, v: int) -> int:
    """``b(u,v) = b_u + b_v - 2*[uv is blue]``."""
    g._check(u)
    g._check(v)
    if not (g.in_blue[u] or g.in_blue[v]):
        raise ValueError(f"neither {u} nor {v} is in the blue layer")
    return int(g.blue_degree[u] + g.blue_degree[v] - 2 * g.has_blue_edge(u, v))


def edge_red_neighbor_count(g: TwoLayerGraph, u: int, v: int) -> int:
    """``r(u,v) = r_u + r_v - 2*[uv is red]``."""
    g._check(u)
    g._check(v)
    return int(g.red_degree[u] + g.red_degree[v] - 2 * g.has_red_edge(u, v))


# -- mlx text format ------------------------------------------------------


def parse_mlx(lines: Iterable[str], path: str | None = None) -> TwoLayerGraph:
    n = None
    blue, red, nb, nr = [], [], [], []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if n is None:
            if len(tok) != 3 or tok[0] != "mlx" or tok[1] != "1":
                raise GraphFormatError("expected header 'mlx 1 <N>'", lineno, path)
            try:
                n = int(tok[2])
            except ValueError:
                raise GraphFormatError(f"bad identity count {tok[2]!r}", lineno, path) from None
            if n < 0:
                raise GraphFormatError("negative identity count", lineno, path)
            continue
        kind = tok[0]
        try:
            ids = [int(t) for t in tok[1:]]
        except ValueError:
            raise GraphFormatError(f"non-integer id in {line!r}", lineno, path) from None
        if any(i < 0 or i >= n for i in ids):
            raise GraphFormatError(f"id out of range [0, {n}) in {line!r}", lineno, path)
        if kind in ("B", "R"):
            if len(ids) != 2:
                raise GraphFormatError(f"edge record needs two ids: {line!r}", lineno, path)
            if ids[0] == ids[1]:
                raise GraphFormatError(f"self-loop {line!r}", lineno, path)
            (blue if kind == "B" else red).append((ids[0], ids[1], lineno))
        elif kind in ("NB", "NR"):
            if len(ids) != 1:
                raise GraphFormatError(f"presence record needs one id: {line!r}", lineno, path)
            (nb if kind == "NB" else nr).append(ids[0])
        else:
            raise GraphFormatError(f"unknown record type {kind!r}", lineno, path)
    if n is None:
        raise GraphFormatError("missing header", None, path)
    for name, recs in (("blue", blue), ("red", red)):
        seen = {}
        for u, v, lineno in recs:
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphFormatError(f"duplicate {name} edge {key} (first on line {seen[key]})", lineno, path)
            seen[key] = lineno
    return TwoLayerGraph.from_edges(
        n, [(u, v) for u, v, _ in blue], [(u, v) for u, v, _ in red], nb, nr
    )


def format_mlx(g: TwoLayerGraph) -> str:
    out = [f"mlx 1 {g.num_identities}"]
    blue_touched = g.blue_degree > 0
    red_touched = g.red_degree > 0
    out += [f"NB {u}" for u in np.flatnonzero(g.in_blue & ~blue_touched)]
    out += [f"NR {u}" for u in np.flatnonzero(g.in_red & ~red_touched)]
    out += [f"B {u} {v}" for u, v in g.blue_edges()]
    out += [f"R {u} {v}" for u, v in g.red_edges()]
    return "\n".join(out) + "\n"


def load_graph(path: str | os.PathLike) -> TwoLayerGraph:
    path = os.fspath(path)
    with open(path, encoding="utf-8") as fh:
        return parse_mlx(fh, path=path)


def save_graph(g: TwoLayerGraph, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_mlx(g))
