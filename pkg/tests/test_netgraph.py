import math

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from topodiag.netgraph import (
    INF,
    DegenerateFailureError,
    IdenticalScenariosError,
    ModelError,
    NetworkModel,
    apply_failure,
    bfs_distances,
    ending_nodes,
    failure_set,
    node_failure_to_links,
    receiving_nodes,
    scenario_difference,
    set_distance,
    shortest_distance,
    shortest_path,
)


@st.composite
def digraphs(draw, max_nodes=7, self_loops=True):
    n = draw(st.integers(1, max_nodes))
    nodes = st.integers(1, n)
    pairs = draw(st.sets(st.tuples(nodes, nodes), max_size=3 * n))
    if not self_loops:
        pairs = {(a, b) for a, b in pairs if a != b}
    return NetworkModel(n, tuple(sorted(pairs)))


def to_nx(model):
    g = nx.DiGraph()
    g.add_nodes_from(model.nodes)
    g.add_edges_from(model.edges)
    return g


# --- examples -------------------------------------------------------------

def test_distance_example2(ex2_graph):
    assert shortest_distance(ex2_graph, 2, 1) == 2


def test_distance_to_self_is_zero(ex2_graph):
    for v in ex2_graph.nodes:
        assert shortest_distance(ex2_graph, v, v) == 0


def test_distance_unreachable_is_inf():
    m = NetworkModel(2, ())
    assert shortest_distance(m, 1, 2) == INF
    assert math.isinf(shortest_distance(m, 1, 2))


def test_distance_node_out_of_range(ex2_graph):
    with pytest.raises(ModelError):
        shortest_distance(ex2_graph, 0, 1)
    with pytest.raises(ModelError):
        shortest_distance(ex2_graph, 1, 6)


def test_apply_failure_examples(ex2_graph):
    g = apply_failure(ex2_graph, {(4, 5)})
    assert len(g.edges) == 5
    assert g.successors()[4] == []
    assert g.sensors == ex2_graph.sensors
    assert len(apply_failure(ex2_graph, {(4, 5), (3, 4)}).edges) == 4
    assert apply_failure(ex2_graph, ex2_graph.edges).edges == ()


def test_apply_failure_rejects_unknown_edge(ex2_graph):
    with pytest.raises(ModelError, match="non-existent"):
        apply_failure(ex2_graph, {(1, 3)})


def test_apply_failure_drops_weights():
    m = NetworkModel(2, ((1, 2), (2, 1)), {(1, 2): 3.0})
    g = apply_failure(m, {(1, 2)})
    assert g.weights == {(2, 1): "free"}


def test_node_failure_examples(ex2_graph, ieee9):
    assert node_failure_to_links(ieee9.model, {1}) == {(1, 4), (4, 1), (1, 1)}
    assert node_failure_to_links(ex2_graph, {4}) == {(3, 4), (4, 5)}
    assert node_failure_to_links(ex2_graph, {1, 5}) == {(5, 1), (1, 2), (2, 5), (4, 5)}


def test_node_failure_isolated_node_is_degenerate():
    m = NetworkModel(3, ((1, 2),))
    with pytest.raises(DegenerateFailureError):
        node_failure_to_links(m, {3})


def test_ending_nodes():
    assert ending_nodes({(1, 4), (4, 1), (1, 1)}) == {4, 1}
    assert ending_nodes({(4, 5), (3, 4)}) == {5, 4}
    assert ending_nodes({(2, 5)}) == {5}


def test_scenario_difference():
    assert scenario_difference({(4, 5), (3, 4)}, {(4, 5)}) == {(3, 4)}
    assert scenario_difference(set(), {(2, 5)}) == {(2, 5)}
    with pytest.raises(IdenticalScenariosError):
        scenario_difference({(2, 5)}, {(2, 5)})


def test_receiving_nodes(ex2_graph):
    assert receiving_nodes(ex2_graph) == {1, 2, 3, 4, 5}
    assert receiving_nodes(NetworkModel(3, ())) == set()
    assert receiving_nodes(NetworkModel(1, ((1, 1),))) == {1}


def test_failure_set_validation(ex2_graph):
    assert failure_set(ex2_graph, [[(1, 2)], [(2, 3)]]) == (frozenset({(1, 2)}), frozenset({(2, 3)}))
    with pytest.raises(ModelError):
        failure_set(ex2_graph, [])
    with pytest.raises(DegenerateFailureError):
        failure_set(ex2_graph, [[]])
    with pytest.raises(IdenticalScenariosError) as info:
        failure_set(ex2_graph, [[(1, 2)], [(2, 3)], [(1, 2)]])
    assert info.value.pair == (1, 3)


@pytest.mark.parametrize("kwargs", [
    dict(node_count=0, edges=()),
    dict(node_count=2, edges=((1, 3),)),
    dict(node_count=2, edges=((1, 2), (1, 2))),
    dict(node_count=2, edges=((1, 2),), weights={(1, 2): 0.0}),
    dict(node_count=2, edges=((1, 2),), weights={(2, 1): 1.0}),
    dict(node_count=2, edges=(), sensors=frozenset({3})),
])
def test_model_validation(kwargs):
    with pytest.raises(ModelError):
        NetworkModel(**kwargs)


def test_shortest_path_is_deterministic(ex2_graph):
    assert shortest_path(ex2_graph, {5}, {1}) == (5, 1)
    assert shortest_path(ex2_graph, {2}, {1}) == (2, 5, 1)
    assert shortest_path(NetworkModel(2, ()), {1}, {2}) is None


# --- oracle and properties --------------------------------------------------

@given(digraphs())
def test_bfs_matches_networkx(model):
    g = to_nx(model)
    for s in model.nodes:
        assert bfs_distances(model, s) == dict(nx.single_source_shortest_path_length(g, s))


@given(digraphs(), st.data())
def test_set_distance_matches_networkx(model, data):
    nodes = st.integers(1, model.node_count)
    src = data.draw(st.sets(nodes, min_size=1))
    dst = data.draw(st.sets(nodes, min_size=1))
    lengths = nx.multi_source_dijkstra_path_length(to_nx(model), src)
    expected = min((lengths[t] for t in dst if t in lengths), default=INF)
    assert set_distance(model, src, dst) == expected
    path = shortest_path(model, src, dst)
    if path is not None:
        assert path[0] in src and path[-1] in dst
        assert all(e in model.edge_set for e in zip(path, path[1:]))


@given(digraphs())
def test_triangle_inequality(model):
    d = {v: bfs_distances(model, v) for v in model.nodes}
    for a in model.nodes:
        for b in model.nodes:
            for c in model.nodes:
                ab, bc, ac = d[a].get(b, INF), d[b].get(c, INF), d[a].get(c, INF)
                assert ac <= ab + bc


@given(digraphs(), st.data())
def test_apply_failure_idempotent_and_commuting(model, data):
    if not model.edges:
        return
    edges = list(model.edges)
    f1 = set(data.draw(st.lists(st.sampled_from(edges), unique=True)))
    f2 = set(data.draw(st.lists(st.sampled_from([e for e in edges if e not in f1] or edges), unique=True))) - f1
    once = apply_failure(model, f1)
    assert apply_failure(once, f1 & once.edge_set) == once
    assert apply_failure(apply_failure(model, f1), f2) == apply_failure(apply_failure(model, f2), f1)


@given(digraphs(), st.data())
def test_difference_ending_nodes(model, data):
    if not model.edges:
        return
    edges = list(model.edges)
    a = frozenset(data.draw(st.lists(st.sampled_from(edges), unique=True)))
    b = frozenset(data.draw(st.lists(st.sampled_from(edges), unique=True)))
    if a == b:
        return
    assert ending_nodes(scenario_difference(a, b)) == ending_nodes(a - b) | ending_nodes(b - a)
