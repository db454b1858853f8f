"""Markov states of the five walks."""

from __future__ import annotations

from typing import NamedTuple

from ..graph import EdgeRef, Layer

B = int(Layer.BLUE)
R = int(Layer.RED)


class NodeTriple(NamedTuple):
    """Last three identities of a node walk and the layer of each hop.

    Hops ``(B,B)``, ``(B,R)`` and ``(R,R)`` correspond to the slot tags
    (Blue,Blue,Blue), (Blue,Blue,RedSample) and (Blue,RedSample,RedSample).
    The unrestricted walk may use any hop combination.
    """

    nodes: tuple[int, int, int]
    hops: tuple[int, int]

    @property
    def tags(self) -> tuple[str, str, str]:
        h1, h2 = self.hops
        if (h1, h2) == (B, B):
            return ("B", "B", "B")
        if (h1, h2) == (B, R):
            return ("B", "B", "R")
        if (h1, h2) == (R, R):
            return ("B", "R", "R")
        return ("?", "?", "?")

    def as_row(self) -> tuple[int, int, int, int, int]:
        return (*self.nodes, *self.hops)


class EdgePair(NamedTuple):
    """Edge-walk state: ``e1`` is blue; ``e2`` shares exactly one endpoint with it."""

    e1: EdgeRef
    e2: EdgeRef

    @classmethod
    def from_nodes(cls, a: int, b: int, c: int, red: bool = False) -> "EdgePair":
        """Pair ({a,b} blue, {b,c} blue or red) sharing node ``b``."""
        return cls(EdgeRef.make(a, b, Layer.BLUE), EdgeRef.make(b, c, Layer.RED if red else Layer.BLUE))

    def nodes(self) -> tuple[int, int, int]:
        """``(a, shared, c)`` with ``e1 = {a, shared}`` and ``e2 = {shared, c}``."""
        u1, v1 = self.e1.u, self.e1.v
        u2, v2 = self.e2.u, self.e2.v
        if u1 in (u2, v2):
            s = u1
        elif v1 in (u2, v2):
            s = v1
        else:
            raise ValueError("edges share no endpoint")
        a = v1 if s == u1 else u1
        c = v2 if s == u2 else u2
        return a, s, c

    @property
    def kind(self) -> int:
        return 1 if self.e2.layer == Layer.RED else 0

    def as_row(self) -> tuple[int, int, int, int, int]:
        a, b, c = self.nodes()
        return (a, b, c, B, self.kind)


def state_from_row(algo: str, row) -> NodeTriple | EdgePair:
    x0, x1, x2, h1, h2 = (int(v) for v in row)
    if algo == "rwebe":
        return EdgePair.from_nodes(x0, x1, x2, red=bool(h2))
    return NodeTriple((x0, x1, x2), (h1, h2))
