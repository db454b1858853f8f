import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlg.generators import (
    GeneratorError,
    GeneratorSpec,
    ModelSpec,
    couple,
    generate,
    ingest_external,
    read_edge_list,
)
from mlg.graph import format_mlx


def _spec(blue="er:n=300,m=900", red="er:ratio=0.4,rho=0.3", coupling=1, seed=0):
    return GeneratorSpec(ModelSpec.parse(blue), ModelSpec.parse(red), coupling, seed)


def _blue_nx(g):
    h = nx.Graph()
    h.add_nodes_from(np.flatnonzero(g.in_blue).tolist())
    h.add_edges_from(map(tuple, g.blue_edges()))
    return h


def test_model_spec_parse():
    m = ModelSpec.parse("er:n=1000,m=9000")
    assert m.kind == "er" and m.params == {"n": 1000, "m": 9000}
    assert ModelSpec.parse("sw:n=10,k=4,p=0.1").params["p"] == 0.1
    assert str(m) == "er:n=1000,m=9000"
    with pytest.raises(GeneratorError):
        ModelSpec.parse("er:n")
    with pytest.raises(GeneratorError):
        ModelSpec.parse("er:n=abc")


@pytest.mark.parametrize("blue", ["er:n=200,m=600", "sw:n=200,k=6,p=0.1", "ba:n=200,m=3"])
def test_generation_is_deterministic(blue):
    a = format_mlx(generate(_spec(blue, seed=4)))
    b = format_mlx(generate(_spec(blue, seed=4)))
    c = format_mlx(generate(_spec(blue, seed=5)))
    assert a == b
    assert a != c


@pytest.mark.parametrize("blue", ["er:n=300,m=900", "sw:n=300,k=6,p=0.1", "ba:n=300,m=3"])
def test_blue_layer_is_connected(blue):
    g = generate(_spec(blue))
    assert nx.is_connected(_blue_nx(g))


def test_coupling_cardinalities():
    rng = np.random.default_rng(0)
    n, red = couple(2000, 1, rng)
    assert n == 2000 and len(red) == 2000
    n, red = couple(2000, 3, rng)
    assert n == 2000 and len(red) == 1000 and red.max() < 2000
    n, red = couple(2000, 2, rng)
    assert n == 3000 and len(red) == 2000
    assert int((red < 2000).sum()) == 1000
    with pytest.raises(GeneratorError):
        couple(10, 4, rng)


@pytest.mark.parametrize("coupling", [1, 2, 3])
def test_generated_layers_respect_coupling(coupling):
    g = generate(_spec(coupling=coupling, seed=1))
    nb = int(g.in_blue.sum())
    red = np.flatnonzero(g.in_red)
    if coupling == 1:
        assert np.array_equal(g.in_red, g.in_blue)
    elif coupling == 2:
        assert g.num_identities == nb + (nb - nb // 2)
        assert int(g.in_red[:nb].sum()) == nb // 2
        assert np.all(~g.in_blue[nb:]) and np.all(g.in_red[nb:])
    else:
        assert len(red) == nb // 2 and np.all(g.in_blue[red])
    for u, v in g.red_edges():
        assert g.in_red[u] and g.in_red[v]


def test_red_edge_ratio_and_duplication():
    g = generate(_spec("er:n=2000,m=10000", "er:ratio=0.4,rho=0.3", seed=2))
    assert g.num_red_edges == round(0.4 * g.num_blue_edges)
    shared = sum(g.has_blue_edge(int(u), int(v)) for u, v in g.red_edges())
    # about rho of the red edges copy a blue edge; random overlap is negligible here
    assert abs(shared / g.num_red_edges - 0.3) < 0.03
    g0 = generate(_spec("er:n=2000,m=10000", "er:ratio=0.4,rho=0.0", seed=2))
    assert sum(g0.has_blue_edge(int(u), int(v)) for u, v in g0.red_edges()) < 20


def test_ba_degree_tail():
    g = generate(_spec("ba:n=2000,m=3", seed=3))
    deg = g.blue_degree[g.in_blue]
    assert deg.min() >= 3
    assert deg.max() > 10 * np.median(deg)


def test_sw_layer_is_nearly_regular():
    g = generate(_spec("sw:n=500,k=6,p=0.0", seed=3))
    assert set(g.blue_degree.tolist()) == {6}


@pytest.mark.parametrize(
    "blue,red",
    [
        ("er:n=2", "er:ratio=0.4"),
        ("er:n=10,m=100", "er:ratio=0.4"),
        ("er:n=10,p=1.5", "er:ratio=0.4"),
        ("sw:n=10,k=20", "er:ratio=0.4"),
        ("ba:n=10,m=0", "er:ratio=0.4"),
        ("zz:n=10", "er:ratio=0.4"),
        ("er:n=50,m=100", "er:rho=2"),
        ("er:n=50,m=100", "er:ratio=-1"),
        ("er:n=50,m=100", "qq:k=2"),
    ],
)
def test_invalid_parameters(blue, red):
    with pytest.raises(GeneratorError):
        generate(_spec(blue, red))


def test_ingest_relabels_and_keeps_giant_component(tmp_path):
    p = tmp_path / "edges.txt"
    p.write_text("# comment\n10 20\n20 30\n30 10\n% other comment\n30 40\n40 40\n100 200\n")
    g, info = ingest_external(p, ModelSpec.parse("er:ratio=0.5,rho=0"), seed=1)
    assert info["input_nodes"] == 6 and info["input_edges"] == 5
    assert info["blue_nodes"] == 4 and info["blue_edges"] == 4
    assert g.num_identities == 4
    # labels sorted numerically: 10, 20, 30, 40 -> 0..3
    assert sorted(map(tuple, g.blue_edges().tolist())) == [(0, 1), (0, 2), (1, 2), (2, 3)]


def test_read_edge_list_rejects_short_lines(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("1 2\n3\n")
    with pytest.raises(GeneratorError, match=":2:"):
        read_edge_list(p)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 1000), st.integers(10, 80), st.sampled_from([1, 2, 3]))
def test_generated_graphs_are_valid(seed, n, coupling):
    m = min(3 * n, n * (n - 1) // 2)
    g = generate(_spec(f"er:n={n},m={m}", coupling=coupling, seed=seed))
    assert nx.is_connected(_blue_nx(g))
    assert np.all(g.blue_degree[g.in_blue] > 0)
    assert np.all(g.red_degree[~g.in_red] == 0)
