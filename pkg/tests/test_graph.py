from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlg.generators import GeneratorSpec, ModelSpec, generate
from mlg.graph import (
    GraphFormatError,
    TwoLayerGraph,
    edge_blue_neighbor_count,
    edge_red_neighbor_count,
    load_graph,
    parse_mlx,
    save_graph,
)


def _load_text(tmp_path, text):
    p = tmp_path / "g.mlx"
    p.write_text(text)
    return load_graph(p)


def test_load_minimal_triangle(tmp_path):
    g = _load_text(tmp_path, "mlx 1 3\nB 0 1\nB 1 2\nB 0 2\n")
    assert g.num_identities == 3
    assert g.num_blue_edges == 3 and g.num_red_edges == 0


def test_presence_inference(tmp_path):
    g = _load_text(tmp_path, "mlx 1 3\nB 0 1\nR 1 2\n")
    assert g.in_blue[1] and g.in_red[1]
    assert g.in_red[2] and not g.in_blue[2]


def test_self_loop_rejected(tmp_path):
    with pytest.raises(GraphFormatError, match="self-loop"):
        _load_text(tmp_path, "mlx 1 3\nB 0 0\n")


@pytest.mark.parametrize(
    "text, needle",
    [
        ("B 0 1\n", "header"),
        ("mlx 1 2\nB 0 2\n", "out of range"),
        ("mlx 1 3\nB 0 1\nB 1 0\n", "duplicate"),
        ("mlx 1 3\nX 0 1\n", "unknown record"),
        ("mlx 1 3\nB 0 x\n", "non-integer"),
    ],
)
def test_parse_errors_carry_line_numbers(text, needle):
    with pytest.raises(GraphFormatError, match=needle) as info:
        parse_mlx(text.splitlines(), path="f.mlx")
    assert "f.mlx" in str(info.value)


def test_comments_and_presence_records():
    g = parse_mlx(["# hi", "mlx 1 4  # header", "NB 3", "NR 2", "B 0 1"])
    assert g.in_blue[3] and not g.in_red[3]
    assert g.in_red[2] and not g.in_blue[2]


def test_cross_layer_multi_edge_allowed():
    g = TwoLayerGraph.from_edges(2, [(0, 1)], [(0, 1)])
    assert g.has_blue_edge(0, 1) and g.has_red_edge(1, 0)


def test_round_trip_triangle_and_empty(tmp_path, blue_triangle):
    save_graph(blue_triangle, tmp_path / "a.mlx")
    assert load_graph(tmp_path / "a.mlx") == blue_triangle
    empty = TwoLayerGraph.from_edges(4, blue_nodes=[0, 1], red_nodes=[2, 3])
    save_graph(empty, tmp_path / "b.mlx")
    assert load_graph(tmp_path / "b.mlx") == empty


def test_round_trip_generated_half_overlap(tmp_path):
    g = generate(GeneratorSpec(ModelSpec.parse("er:n=200,m=600"), ModelSpec.parse("er:ratio=0.5,rho=0.2"), 2, 5))
    save_graph(g, tmp_path / "c.mlx")
    assert load_graph(tmp_path / "c.mlx") == g


def test_edge_neighbor_counts_examples(blue_triangle):
    assert edge_blue_neighbor_count(blue_triangle, 0, 1) == 2
    path = TwoLayerGraph.from_edges(3, [(0, 1), (1, 2)])
    assert edge_blue_neighbor_count(path, 0, 1) == 1
    red = TwoLayerGraph.from_edges(3, [(0, 1)], [(1, 2)])
    assert edge_red_neighbor_count(red, 1, 2) == 0
    with pytest.raises(KeyError):
        edge_blue_neighbor_count(blue_triangle, 0, 7)


@st.composite
def graphs(draw, max_n=14):
    n = draw(st.integers(2, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    blue = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    red = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    extra_b = draw(st.lists(st.integers(0, n - 1), max_size=3))
    extra_r = draw(st.lists(st.integers(0, n - 1), max_size=3))
    return TwoLayerGraph.from_edges(n, blue, red, extra_b, extra_r)


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_graph_invariants(g):
    assert int(g.blue_degree.sum()) == 2 * g.num_blue_edges
    assert int(g.red_degree.sum()) == 2 * g.num_red_edges
    for u in range(g.num_identities):
        nb = g.blue_neighbors(u)
        assert np.all(np.diff(nb) > 0) and u not in nb
        for v in nb:
            assert g.has_blue_edge(v, u) and g.in_blue[v]
        for v in g.red_neighbors(u):
            assert g.has_red_edge(v, u) and g.in_red[v]
    assert parse_mlx(__import__("mlg.graph", fromlist=["x"]).format_mlx(g).splitlines()) == g


@settings(max_examples=40, deadline=None)
@given(graphs())
def test_edge_counts_match_enumeration(g):
    blue = [tuple(e) for e in g.blue_edges().tolist()]
    red = [tuple(e) for e in g.red_edges().tolist()]
    for u, v in blue:
        touching = [e for e in blue if len({u, v} & set(e)) == 1]
        assert edge_blue_neighbor_count(g, u, v) == len(touching)
        touching_r = [e for e in red if len({u, v} & set(e)) == 1]
        assert edge_red_neighbor_count(g, u, v) == len(touching_r)
