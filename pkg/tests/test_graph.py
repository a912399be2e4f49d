import json

import pytest
from hypothesis import given, settings

from pebblekit.generators import hard_family, pyramid, road
from pebblekit.graph import (
    Dag, GraphError, deserialize, from_dict, predecessors, serialize, to_dict, validate,
)
from strategies import small_dags


def test_single_node_is_valid():
    d = Dag.build(1, [], [1], [1])
    assert validate(d).ok


def test_two_cycle_reports_acyclic():
    d = Dag(2, frozenset({(1, 2), (2, 1)}), frozenset(), frozenset({2}))
    rep = validate(d)
    assert not rep.ok
    assert "acyclic" in rep.rules()


def test_self_loop_and_degree_rules():
    d = Dag(2, frozenset({(1, 1), (1, 2)}), frozenset({2}), frozenset({1}))
    rules = validate(d).rules()
    assert {"self-loop", "source-indegree", "target-outdegree"} <= rules


def test_indegree_flag():
    d = Dag.build(4, [(1, 4), (2, 4), (3, 4)], max_indegree_2=True)
    assert "max-indegree-2" in validate(d).rules()
    assert validate(Dag.build(4, [(1, 4), (2, 4), (3, 4)])).ok


def test_no_targets():
    d = Dag(1, frozenset(), frozenset({1}), frozenset())
    assert "no-targets" in validate(d).rules()


def test_pyramid4_valid_indegree_two():
    g = pyramid(4)
    assert validate(g).ok
    assert g.max_indegree == 2


def test_predecessors():
    g = pyramid(2)
    apex = next(iter(g.targets))
    assert predecessors(g, apex) == g.sources
    for s in g.sources:
        assert predecessors(g, s) == frozenset()
    assert predecessors(hard_family(10, 2), 7) == {1, 6}
    with pytest.raises(GraphError):
        g.predecessors(99)


def test_unknown_node_edge_rejected():
    with pytest.raises(GraphError):
        Dag.build(2, [(1, 3)])


def test_duplicate_edges_collapse_on_build():
    d = Dag.build(2, [(1, 2), (1, 2)])
    assert len(d.edges) == 1


def test_one_node_round_trip():
    d = Dag.build(1, [], [1], [1])
    assert deserialize(serialize(d)) == d


def test_dot_pyramid3():
    text = serialize(pyramid(3), "dot")
    assert text.count("->") == 6
    node_lines = [l for l in text.splitlines() if l.strip().startswith("v") and "->" not in l]
    assert len(node_lines) == 6
    assert "doublecircle" in text and "shape=box" in text


def test_duplicate_edge_in_document_rejected():
    doc = to_dict(pyramid(2))
    doc["edges"].append(doc["edges"][0])
    with pytest.raises(GraphError, match="duplicate"):
        from_dict(doc)


def test_version_mismatch_rejected():
    doc = to_dict(pyramid(2))
    doc["version"] = 99
    with pytest.raises(GraphError, match="version"):
        deserialize(json.dumps(doc))


@pytest.mark.parametrize("bad", ["not json", "[]", '{"version": 1}', '{"version": 1, "n": 2, "edges": [[1]], "sources": [], "targets": []}'])
def test_malformed_documents(bad):
    with pytest.raises(GraphError):
        deserialize(bad)


def test_cycle_has_no_topological_order():
    d = Dag(2, frozenset({(1, 2), (2, 1)}), frozenset(), frozenset())
    with pytest.raises(GraphError):
        d.topological_order


@pytest.mark.parametrize("g", [pyramid(3), road(3, targets=[1, 3]), hard_family(10, 2)], ids=["pyramid", "road", "hard"])
def test_generated_round_trip_and_topology(g):
    back = deserialize(serialize(g))
    assert back == g
    assert back.topological_order == g.topological_order
    assert back.labels == g.labels


@settings(max_examples=80, deadline=None)
@given(small_dags())
def test_round_trip_property(d):
    back = deserialize(serialize(d))
    assert back == d
    assert list(back.nodes) == list(range(1, d.n + 1))
    order = back.topological_order
    pos = {v: i for i, v in enumerate(order)}
    assert all(pos[u] < pos[v] for u, v in d.edges)
    assert validate(d).ok
