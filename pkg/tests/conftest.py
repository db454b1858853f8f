from __future__ import annotations

import itertools

import numpy as np
import pytest

from mlg.graph import TwoLayerGraph


def random_two_layer(rng: np.random.Generator, n: int, p_blue: float, p_red: float, connect: bool = True,
                     red_only: int = 0) -> TwoLayerGraph:
    """Random graph; ``connect`` adds a blue spanning path, ``red_only`` extra red-only identities."""
    pairs = list(itertools.combinations(range(n), 2))
    blue = {p for p in pairs if rng.random() < p_blue}
    if connect:
        order = rng.permutation(n)
        blue |= {tuple(sorted((int(order[i]), int(order[i + 1])))) for i in range(n - 1)}
    total = n + red_only
    red_pairs = list(itertools.combinations(range(total), 2))
    red = [p for p in red_pairs if rng.random() < p_red]
    return TwoLayerGraph.from_edges(total, sorted(blue), red, blue_nodes=range(n))


@pytest.fixture
def blue_triangle() -> TwoLayerGraph:
    return TwoLayerGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def hub_graph() -> TwoLayerGraph:
    # A..E = 0..4; C has blue neighbours B, D, E and one red neighbour A.
    return TwoLayerGraph.from_edges(5, [(0, 1), (1, 2), (2, 3), (2, 4), (0, 3)], [(2, 0)])


# one summary line per acceptance criterion, printed after the test run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
