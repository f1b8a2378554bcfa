import networkx as nx
import numpy as np
import pytest

from graphs import (
    GraphFormatError,
    format_graph,
    gen_graph,
    parse_graph,
    parse_graph_text,
    random_regular_edges,
    write_graph,
)


def test_three_regular_on_four_vertices_is_k4():
    graph = gen_graph(4, "3regular", seed=0)
    assert graph.edges == [(1, 2, 1), (1, 3, 1), (1, 4, 1), (2, 3, 1), (2, 4, 1), (3, 4, 1)]
    assert graph.name == "3reg_n4_s0"


@pytest.mark.parametrize("n", [6, 8, 12])
def test_three_regular_graphs_are_simple_and_connected(n):
    graph = gen_graph(n, "3regular", seed=n)
    g = graph.to_networkx()
    assert len(graph.edges) == 3 * n // 2
    assert all(d == 3 for _, d in g.degree())
    assert nx.is_connected(g)


def test_generation_is_seeded():
    assert gen_graph(10, seed=4).edges == gen_graph(10, seed=4).edges


def test_regular_generator_rejects_impossible_parameters():
    with pytest.raises(ValueError):
        gen_graph(5, "3regular")
    with pytest.raises(ValueError):
        random_regular_edges(4, 4, np.random.default_rng(0))
    with pytest.raises(ValueError):
        gen_graph(6, "petersen")


def test_erdos_renyi_extremes():
    assert gen_graph(5, "erdos_renyi", p=0.0).edges == []
    assert len(gen_graph(5, "erdos_renyi", p=1.0).edges) == 10
    with pytest.raises(ValueError):
        gen_graph(5, "erdos_renyi", p=1.5)


def test_signed_weights():
    graph = gen_graph(8, "erdos_renyi", seed=2, p=1.0, weights="pm1")
    weights = {w for _, _, w in graph.edges}
    assert weights <= {-1, 1}
    assert graph.name.endswith("_pm1")


def test_write_and_parse(tmp_path):
    graph = gen_graph(6, "3regular", seed=3)
    path = write_graph(graph, tmp_path / "instances" / "g.txt")
    parsed = parse_graph(path)
    assert parsed.edges == graph.edges
    assert parsed.n_vertices == 6
    assert parsed.name == "g"


def test_parse_skips_comments_and_blank_lines():
    text = "# a square\n4 2\n\n1 2 1\n# middle\n3 4 -2\n"
    graph = parse_graph_text(text)
    assert graph.edges == [(1, 2, 1), (3, 4, -2)]
    assert format_graph(graph) == "4 2\n1 2 1\n3 4 -2\n"


@pytest.mark.parametrize("text", [
    "",
    "3\n",
    "3 2\n1 2 1\n",
    "3 1\n1 2\n",
    "3 1\n1 2 x\n",
    "3 1\n1 1 1\n",
    "3 1\n1 5 1\n",
    "3 2\n1 2 1\n2 1 1\n",
])
def test_malformed_instances(text):
    with pytest.raises(GraphFormatError):
        parse_graph_text(text)
