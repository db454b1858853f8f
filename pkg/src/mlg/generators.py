"""Synthetic two-layer graphs: ER/SW/BA blue layers, synthetic red layers, coupling modes."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .graph import TwoLayerGraph

COUPLINGS = {
    "one-to-one": 1,
    "1": 1,
    "half-overlap": 2,
    "2": 2,
    "blue-double": 3,
    "3": 3,
}


class GeneratorError(ValueError):
    pass


@dataclass
class ModelSpec:
    kind: str
    params: dict = field(default_factory=dict)

    @classmethod
    def parse(cls, text: str) -> "ModelSpec":
        """``"er:n=1000,m=9000"`` -> ModelSpec("er", {"n": 1000, "m": 9000})."""
        kind, _, rest = text.partition(":")
        params = {}
        for item in filter(None, (p.strip() for p in rest.split(","))):
            key, eq, val = item.partition("=")
            if not eq:
                raise GeneratorError(f"bad parameter {item!r} in {text!r}")
            params[key.strip()] = _number(val.strip())
        return cls(kind.strip().lower(), params)

    def __str__(self) -> str:
        return self.kind + ":" + ",".join(f"{k}={v}" for k, v in self.params.items())


def _number(s: str):
    try:
        return int(s)
    except ValueError:
        try:
            return float(s)
        except ValueError:
            raise GeneratorError(f"parameter value {s!r} is not a number") from None


@dataclass
class GeneratorSpec:
    blue: ModelSpec
    red: ModelSpec = field(default_factory=lambda: ModelSpec("er", {"ratio": 0.4, "rho": 0.3}))
    coupling: int = 1
    seed: int = 0


def _nx_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**31 - 1))


def _check_prob(name, p):
    if not 0.0 <= float(p) <= 1.0:
        raise GeneratorError(f"{name}={p} must lie in [0, 1]")


def blue_graph(model: ModelSpec, rng: np.random.Generator) -> nx.Graph:
    p = model.params
    n = int(p.get("n", 0))
    if n < 3:
        raise GeneratorError("blue layer needs n >= 3")
    seed = _nx_seed(rng)
    if model.kind == "er":
        if "m" in p:
            m = int(p["m"])
            if m < 0 or m > n * (n - 1) // 2:
                raise GeneratorError(f"m={m} out of range for n={n}")
            return nx.gnm_random_graph(n, m, seed=seed)
        _check_prob("p", p.get("p", 0.0))
        return nx.fast_gnp_random_graph(n, float(p["p"]), seed=seed)
    if model.kind == "sw":
        k = int(p.get("k", 4))
        rp = float(p.get("p", 0.1))
        _check_prob("p", rp)
        if k >= n or k < 2:
            raise GeneratorError(f"k={k} must satisfy 2 <= k < n")
        return nx.watts_strogatz_graph(n, k, rp, seed=seed)
    if model.kind == "ba":
        if "m" in p:
            m = int(p["m"])
        elif "edges" in p:
            m = max(1, round(int(p["edges"]) / n))
        else:
            m = 3
        if m < 1 or m >= n:
            raise GeneratorError(f"attachment m={m} must satisfy 1 <= m < n")
        return nx.barabasi_albert_graph(n, m, seed=seed)
    raise GeneratorError(f"unknown blue model {model.kind!r}")


def giant_component(graph: nx.Graph) -> nx.Graph:
    if graph.number_of_nodes() == 0:
        return graph
    nodes = max(nx.connected_components(graph), key=lambda c: (len(c), -min(c)))
    sub = graph.subgraph(nodes)
    return nx.convert_node_labels_to_integers(sub, ordering="sorted")


def couple(n_blue: int, coupling: int, rng: np.random.Generator) -> tuple[int, np.ndarray]:
    """Identity count and sorted red-present identities for a coupling mode."""
    if coupling == 1:
        return n_blue, np.arange(n_blue)
    half = n_blue // 2
    chosen = np.sort(rng.choice(n_blue, size=half, replace=False))
    if coupling == 2:
        fresh = np.arange(n_blue, n_blue + (n_blue - half))
        return n_blue + len(fresh), np.concatenate([chosen, fresh])
    if coupling == 3:
        return n_blue, chosen
    raise GeneratorError(f"unknown coupling {coupling}")


def red_edges(
    model: ModelSpec,
    red_ids: np.ndarray,
    blue_edges: np.ndarray,
    rng: np.random.Generator,
) -> list[tuple[int, int]]:
    p = model.params
    k = len(red_ids)
    if k < 2:
        return []
    if model.kind == "er":
        ratio = float(p.get("ratio", 0.4))
        rho = float(p.get("rho", 0.0))
        _check_prob("rho", rho)
        if ratio < 0:
            raise GeneratorError("ratio must be >= 0")
        if "m" in p:
            target = int(p["m"])
        elif "p" in p:
            _check_prob("p", p["p"])
            target = int(rng.binomial(k * (k - 1) // 2, float(p["p"])))
        else:
            target = int(round(ratio * len(blue_edges)))
        target = min(target, k * (k - 1) // 2)
        size = max(int(red_ids.max()), int(blue_edges.max()) if len(blue_edges) else 0) + 1
        present = np.zeros(size, dtype=bool)
        present[red_ids] = True
        # blue edges eligible for duplication into the red layer
        dup_pool = blue_edges[present[blue_edges].all(axis=1)] if len(blue_edges) else blue_edges
        edges: set[tuple[int, int]] = set()
        attempts = 0
        while len(edges) < target:
            attempts += 1
            if attempts > 50 * target + 1000:
                raise GeneratorError("could not place the requested number of red edges")
            if len(dup_pool) and rng.random() < rho:
                u, v = dup_pool[rng.integers(len(dup_pool))]
            else:
                i, j = rng.integers(k, size=2)
                if i == j:
                    continue
                u, v = red_ids[i], red_ids[j]
            e = (int(min(u, v)), int(max(u, v)))
            edges.add(e)
        return sorted(edges)
    perm = rng.permutation(red_ids)
    if model.kind == "sw":
        kk = int(p.get("k", 4))
        if kk >= k:
            raise GeneratorError(f"red k={kk} must be < |V_R|={k}")
        h = nx.watts_strogatz_graph(k, kk, float(p.get("p", 0.1)), seed=_nx_seed(rng))
    elif model.kind == "ba":
        m = int(p.get("m", 2))
        if m < 1 or m >= k:
            raise GeneratorError(f"red m={m} must satisfy 1 <= m < |V_R|")
        h = nx.barabasi_albert_graph(k, m, seed=_nx_seed(rng))
    else:
        raise GeneratorError(f"unknown red model {model.kind!r}")
    return sorted((int(min(perm[u], perm[v])), int(max(perm[u], perm[v]))) for u, v in h.edges())


def assemble(blue: nx.Graph, red_model: ModelSpec, coupling: int, rng: np.random.Generator) -> TwoLayerGraph:
    blue = giant_component(blue)
    n_blue = blue.number_of_nodes()
    be = np.array(sorted((min(u, v), max(u, v)) for u, v in blue.edges()), dtype=np.int64).reshape(-1, 2)
    n, red_ids = couple(n_blue, coupling, rng)
    re = red_edges(red_model, red_ids, be, rng)
    return TwoLayerGraph.from_edges(n, be, re, blue_nodes=range(n_blue), red_nodes=red_ids)


def generate(spec: GeneratorSpec) -> TwoLayerGraph:
    """Deterministic in ``spec.seed``."""
    rng = np.random.default_rng(spec.seed)
    return assemble(blue_graph(spec.blue, rng), spec.red, spec.coupling, rng)


def read_edge_list(path: str | os.PathLike) -> nx.Graph:
    graph = nx.Graph()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].split("%", 1)[0].strip()
            if not line:
                continue
            tok = line.split()
            if len(tok) < 2:
                raise GeneratorError(f"{os.fspath(path)}:{lineno}: expected two node labels")
            u, v = tok[0], tok[1]
            if u != v:
                graph.add_edge(u, v)
    return graph


def _label_key(x: str):
    return (0, int(x), "") if x.lstrip("-").isdigit() else (1, 0, x)


def ingest_external(
    path: str | os.PathLike,
    red: ModelSpec,
    coupling: int = 1,
    seed: int = 0,
) -> tuple[TwoLayerGraph, dict]:
    """Real blue edge list plus a synthetic red layer."""
    raw = read_edge_list(path)
    ordered = sorted(raw.nodes(), key=_label_key)
    relabel = {x: i for i, x in enumerate(ordered)}
    graph = nx.relabel_nodes(raw, relabel)
    rng = np.random.default_rng(seed)
    g = assemble(graph, red, coupling, rng)
    info = {
        "input_nodes": raw.number_of_nodes(),
        "input_edges": raw.number_of_edges(),
        "blue_nodes": int(g.in_blue.sum()),
        "blue_edges": g.num_blue_edges,
        "red_nodes": int(g.in_red.sum()),
        "red_edges": g.num_red_edges,
    }
    return g, info
