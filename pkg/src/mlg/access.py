"""Query gateway enforcing the restricted sampling model.

The blue layer supports neighbour traversal. The red layer only supports
sampling a red neighbour of an identity already visited by the blue walk, and
(with a two-hop budget) listing the red neighbours of such a sampled node.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .graph import TwoLayerGraph


class RestrictionError(RuntimeError):
    """A sampler attempted a query the access model forbids."""


@dataclass
class QueryStats:
    blue: int = 0
    red_of_blue: int = 0
    red_of_red: int = 0
    degree: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    def __iadd__(self, other: "QueryStats") -> "QueryStats":
        self.blue += other.blue
        self.red_of_blue += other.red_of_blue
        self.red_of_red += other.red_of_red
        self.degree += other.degree
        return self


class UniformStream:
    """Sequential U[0,1) draws from a numpy Generator, generated in chunks.

    ``Generator.random(k)`` yields the same values as ``k`` single calls, so the
    chunk size does not affect the sequence.
    """

    def __init__(self, rng: np.random.Generator, chunk: int = 4096):
        self.rng = rng
        self.chunk = chunk
        self.buf = np.empty(0)
        self.pos = 0

    def next(self) -> float:
        if self.pos >= len(self.buf):
            self.buf = self.rng.random(self.chunk)
            self.pos = 0
        u = self.buf[self.pos]
        self.pos += 1
        return float(u)

    def index(self, k: int) -> int:
        """Uniform index in ``[0, k)``."""
        i = int(self.next() * k)
        return k - 1 if i >= k else i


def trial_generator(base_seed: int, trial: int = 0) -> np.random.Generator:
    """Counter-based stream per (base_seed, trial); independent of scheduling."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(base_seed), int(trial)])))


class RestrictedAccess:
    """One instance per walk; tracks what the walk may legally query."""

    def __init__(self, g: TwoLayerGraph, red_hop_budget: int = 1):
        if red_hop_budget not in (1, 2):
            raise ValueError("red_hop_budget must be 1 or 2")
        self.g = g
        self.red_hop_budget = red_hop_budget
        self.visited: set[int] = set()
        self.named: set[int] = set()  # blue identities revealed by a legal query
        self.red_depth: dict[int, int] = {}
        self.stats = QueryStats()

    def _require_blue(self, u: int) -> None:
        self.g._check(u)
        if not self.g.in_blue[u]:
            raise RestrictionError(f"identity {u} is not in the blue layer")

    def seed(self, node: int) -> None:
        self._require_blue(node)
        self.visited.add(node)
        self.named.add(node)

    def blue_neighbors(self, u: int) -> tuple[np.ndarray, int, int]:
        """Blue adjacency of ``u`` with its degrees ``(b_u, r_u)``; marks ``u`` visited."""
        self._require_blue(u)
        if u not in self.named and u not in self.visited:
            raise RestrictionError(f"blue identity {u} was never reached by a legal query")
        self.stats.blue += 1
        self.visited.add(u)
        nb = self.g.blue_neighbors(u)
        self.named.update(nb.tolist())
        return nb, int(self.g.blue_degree[u]), int(self.g.red_degree[u])

    def sample_red_neighbor(self, u: int, rng: UniformStream, exclude: int | None = None) -> int:
        """Uniform red neighbour of visited blue ``u``, optionally excluding one identity."""
        if u not in self.visited:
            raise RestrictionError(f"red sampling from unvisited identity {u}")
        nb = self.g.red_neighbors(u)
        if exclude is not None and len(nb):
            nb = nb[nb != exclude]
        if len(nb) == 0:
            raise RestrictionError(f"identity {u} has no red neighbour to sample")
        self.stats.red_of_blue += 1
        y = int(nb[rng.index(len(nb))])
        if self.red_depth.get(y, 2) > 1:
            self.red_depth[y] = 1
        return y

    def red_neighbors_of_red(self, y: int) -> tuple[np.ndarray, int]:
        if self.red_hop_budget < 2:
            raise RestrictionError("second red hop requested under a one-hop budget")
        depth = self.red_depth.get(y)
        if depth is None:
            raise RestrictionError(f"red identity {y} was never sampled")
        if depth != 1:
            raise RestrictionError(f"red identity {y} is at depth {depth}")
        self.stats.red_of_red += 1
        nb = self.g.red_neighbors(y)
        for z in nb.tolist():
            self.red_depth.setdefault(z, 2)
        return nb, len(nb)

    def has_red_edge(self, u: int, v: int) -> bool:
        """Pair lookup used by the edge walk to exclude a shared red edge."""
        if u not in self.visited or v not in self.visited:
            raise RestrictionError(f"red pair lookup ({u},{v}) needs both ends visited")
        self.stats.degree += 1
        return self.g.has_red_edge(u, v)

    def degrees(self, u: int) -> tuple[int, int]:
        if u not in self.visited:
            raise RestrictionError(f"degree query on unvisited identity {u}")
        self.stats.degree += 1
        return int(self.g.blue_degree[u]), int(self.g.red_degree[u])


class UnrestrictedAccess:
    """Both layers fully traversable; same counters as :class:`RestrictedAccess`."""

    def __init__(self, g: TwoLayerGraph):
        self.g = g
        self.stats = QueryStats()

    def seed(self, node: int) -> None:
        self.g._check(node)

    def blue_neighbors(self, u: int) -> tuple[np.ndarray, int, int]:
        self.stats.blue += 1
        return self.g.blue_neighbors(u), int(self.g.blue_degree[u]), int(self.g.red_degree[u])

    def red_neighbors(self, u: int) -> np.ndarray:
        self.stats.red_of_blue += 1
        return self.g.red_neighbors(u)


class ComplianceHarness(RestrictedAccess):
    """Facade that records every attempted query, including refused ones.

    ``violations`` lists refused calls; with ``strict`` the refusal propagates and
    aborts the walk.
    """

    def __init__(self, g: TwoLayerGraph, red_hop_budget: int = 1, strict: bool = True):
        super().__init__(g, red_hop_budget)
        self.strict = strict
        self.attempts = {"blue": 0, "red_of_blue": 0, "red_of_red": 0, "degree": 0}
        # red queries keyed by the depth of the identities they reveal
        self.red_queries_by_depth = {1: 0, 2: 0, 3: 0}
        self.violations: list[str] = []

    def _guard(self, kind: str, fn, *args, **kw):
        self.attempts[kind] += 1
        try:
            return fn(*args, **kw)
        except RestrictionError as exc:
            self.violations.append(f"{kind}: {exc}")
            if self.strict:
                raise
            return None

    def blue_neighbors(self, u):
        return self._guard("blue", super().blue_neighbors, u)

    def sample_red_neighbor(self, u, rng, exclude=None):
        self.red_queries_by_depth[1] += 1
        return self._guard("red_of_blue", super().sample_red_neighbor, u, rng, exclude)

    def red_neighbors_of_red(self, y):
        d = self.red_depth.get(y)
        if d is not None:
            self.red_queries_by_depth[min(d + 1, 3)] += 1
        return self._guard("red_of_red", super().red_neighbors_of_red, y)

    def has_red_edge(self, u, v):
        return self._guard("degree", super().has_red_edge, u, v)

    def degrees(self, u):
        return self._guard("degree", super().degrees, u)
