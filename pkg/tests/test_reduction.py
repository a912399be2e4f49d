import itertools

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from pebblekit.engine import replay
from pebblekit.graph import Dag, validate
from pebblekit.qbf import EXISTS, FORALL, QbfFormula, evaluate_qbf, parse_qbf
from pebblekit.reduction import (
    NODE_COUNT_CONSTANT, ReductionError, SynthesisError, build_reduction,
    expected_node_count, node_envelope, schedule, synthesize_strategy,
)
from pebblekit.solvers import min_pebbles

ONE = "p cnf 1 1\ne 1 0\n1 1 1 0\n"
AE = "p cnf 2 2\na 1 0\ne 2 0\n1 2 2 0\n-1 -2 -2 0\n"


def build(text, K):
    f = parse_qbf(text)
    dag, layout = build_reduction(f, K)
    return f, dag, layout


def test_smallest_instance_shape():
    f, dag, layout = build(ONE, 2)
    assert len(layout.clauses) == 2 and len(layout.blocks) == 1
    assert layout.clauses[0].literals == layout.clauses[1].literals
    assert dag.n <= NODE_COUNT_CONSTANT * node_envelope(2, 1, 1)
    assert dag.targets == {layout.target}


def test_schedule_values():
    assert schedule(2, 2)[:2] == [21, 15]
    _, _, layout = build(AE, 2)
    assert layout.schedule[:2] == [21, 15] and layout.schedule[-1] == 9


def test_k1_rejected():
    with pytest.raises(ReductionError):
        build(ONE, 1)


@pytest.mark.parametrize("K", [2, 3])
def test_structure(K):
    f, dag, layout = build(AE, K)
    assert validate(dag).ok
    assert dag.max_indegree <= 2
    assert dag.n == expected_node_count(K, f.u, f.c, [q for q, _ in f.prefix])
    assert set(dag.labels) == set(dag.nodes)
    for name, nodes in layout.groups().items():
        if name != "target":
            assert len(nodes) == K, name
    for blk in layout.blocks:
        for name, rows_l in blk.pyramids.items():
            offset = {"xp": 0, "d": K}.get(name, 2 * K)
            assert [len(r[0]) for r in rows_l] == [blk.s - offset - l for l in range(K)]


def _road_subgraph(dag, road, outs):
    nodes = set(road.inputs)
    for layer in road.layers:
        nodes |= set(layer)
    for rows in road.out_rows:
        for r in rows:
            nodes |= set(r)
    ids = {v: i for i, v in enumerate(sorted(nodes), 1)}
    edges = [(ids[u], ids[v]) for u, v in dag.edges if u in nodes and v in nodes]
    return Dag.build(len(ids), edges, [ids[v] for v in road.inputs], [ids[road.outputs[o]] for o in outs])


@pytest.mark.parametrize("K", [2, 3])
def test_embedded_roads_obey_road_law(K):
    _, dag, layout = build(ONE if K == 3 else AE, K)
    checked = 0
    for blk in layout.blocks:
        for road in blk.roads.values():
            subsets = [c for size in range(1, K + 1) for c in itertools.combinations(range(K), size)]
            if K == 3:
                subsets = [(0,), (0, 2), (0, 1, 2)]
            for outs in subsets:
                sub = _road_subgraph(dag, road, outs)
                assert min_pebbles(sub).optimum == K + len(outs) - 1
                checked += 1
    assert checked


def test_single_exists_strategy():
    f, dag, layout = build(ONE, 2)
    res = synthesize_strategy(dag, layout, f, evaluate_qbf(f))
    assert res.complete and res.space <= 15 and res.bound == 15
    rep = replay(dag, res.strategy)
    assert (rep.space, rep.time, rep.complete) == (res.space, res.time, True)


def _placements_on(strategy, v):
    return sum(1 for m in strategy.moves if m.op == "PlaceBlack" and m.v == v)


def test_universal_block_runs_clause_region_twice():
    f, dag, layout = build(AE, 2)
    res = synthesize_strategy(dag, layout, f, evaluate_qbf(f))
    assert res.complete and res.space <= layout.s
    assert res.clause_passes == 2
    assert _placements_on(res.strategy, layout.phat0[0]) == 2


def test_double_false_shortcut_runs_once():
    f, dag, layout = build("p cnf 2 1\na 1 0\ne 2 0\n2 2 2 0\n", 2)
    res = synthesize_strategy(dag, layout, f, evaluate_qbf(f, allow_double_false=True))
    assert res.complete and res.space <= layout.s
    assert _placements_on(res.strategy, layout.phat0[0]) == 1


def test_false_formula_names_clause():
    f, dag, layout = build("p cnf 1 1\na 1 0\n1 1 1 0\n", 2)
    with pytest.raises(SynthesisError, match=r"clause 1 \(x1 or x1 or x1\)"):
        synthesize_strategy(dag, layout, f, evaluate_qbf(f))


def test_clause_region_peak():
    f, dag, layout = build(AE, 3)
    res = synthesize_strategy(dag, layout, f, evaluate_qbf(f))
    assert res.clause_peak <= 4 * 3 + 1


lit = st.tuples(st.integers(1, 3), st.booleans())


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
@given(
    st.lists(st.sampled_from([EXISTS, FORALL]), min_size=1, max_size=3),
    st.lists(st.tuples(lit, lit, lit), min_size=1, max_size=4),
    st.booleans(),
)
def test_synthesis_property(qs, clauses, dfalse):
    u = len(qs)
    clauses = tuple(tuple((1 + (v - 1) % u, p) for v, p in cl) for cl in clauses)
    f = QbfFormula(tuple(zip(qs, range(1, u + 1))), clauses)
    pol = evaluate_qbf(f, allow_double_false=dfalse)
    if not pol.truth:
        return
    dag, layout = build_reduction(f, 2)
    res = synthesize_strategy(dag, layout, f, pol)
    assert res.complete
    assert res.space <= 3 * 2 * u + 4 * 2 + 1
