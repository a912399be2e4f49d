import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pebblekit.engine import (
    EMPTY, Configuration, Game, IllegalMove, Move, Strategy, apply_move, census,
    configurations, frugality, place, remove, replay, slide,
)
from pebblekit.generators import binary_tree, pyramid
from pebblekit.graph import Dag
from pebblekit.solvers import min_moves, min_pebbles
from oracle import frugal_by_paths
from strategies import small_dags


def p2():
    g = pyramid(2)
    b1, b2 = sorted(g.sources)
    apex = next(iter(g.targets))
    return g, b1, b2, apex


def test_place_source():
    g, b1, _, _ = p2()
    assert apply_move(g, "standard", EMPTY, place(b1)) == Configuration(frozenset({b1}))


def test_slide_onto_apex():
    g, b1, b2, apex = p2()
    c = Configuration(frozenset({b1, b2}))
    assert apply_move(g, "standard", c, slide(b1, apex)).black == {apex, b2}


def test_white_anywhere():
    g, _, _, apex = p2()
    assert apply_move(g, "bw", EMPTY, Move("PlaceWhite", apex)).white == {apex}


def test_place_non_source_rejected():
    g, _, _, apex = p2()
    with pytest.raises(IllegalMove, match="predecessors"):
        apply_move(g, "standard", EMPTY, place(apex))


def test_standard_rejects_white():
    g, _, _, apex = p2()
    with pytest.raises(IllegalMove, match="standard"):
        apply_move(g, "standard", EMPTY, Move("PlaceWhite", apex))


def test_black_placement_counts_white_preds():
    g, b1, b2, apex = p2()
    c = Configuration(frozenset({b1}), frozenset({b2}))
    assert apex in apply_move(g, "bw", c, place(apex)).black


def test_white_removal_rules():
    g, b1, b2, apex = p2()
    c = Configuration(frozenset(), frozenset({apex}))
    with pytest.raises(IllegalMove):
        apply_move(g, "bw", c, Move("RemoveWhite", apex))
    c2 = Configuration(frozenset({b1, b2}), frozenset({apex}))
    assert apply_move(g, "bw", c2, Move("RemoveWhite", apex)).white == frozenset()
    c3 = Configuration(frozenset(), frozenset({b1}))
    assert apply_move(g, "bw", c3, Move("RemoveWhite", b1)) == EMPTY


def test_white_slide():
    g, b1, b2, apex = p2()
    c = Configuration(frozenset({b2}), frozenset({apex}))
    out = apply_move(g, "bw", c, Move("SlideWhite", apex, b1))
    assert out.white == {b1} and out.black == {b2}
    with pytest.raises(IllegalMove):
        apply_move(g, "bw", Configuration(frozenset(), frozenset({apex})), Move("SlideWhite", apex, b1))


@pytest.mark.parametrize("cfg,mv", [
    (EMPTY, remove(1)),
    (EMPTY, slide(1, 3)),
    (Configuration(frozenset({1, 3})), slide(1, 3)),
    (Configuration(frozenset({1, 2})), slide(1, 2)),
    (EMPTY, place(9)),
])
def test_illegal_moves(cfg, mv):
    g = pyramid(2)
    with pytest.raises(IllegalMove):
        apply_move(g, "standard", cfg, mv)


def test_move_validation():
    with pytest.raises(ValueError):
        Move("Jump", 1)
    with pytest.raises(ValueError):
        Move("SlideBlack", 1)
    with pytest.raises(ValueError):
        Move("PlaceBlack", 1, 2)
    with pytest.raises(ValueError):
        Configuration(frozenset({1}), frozenset({1}))


def test_replay_single_node():
    g = Dag.build(1, [], [1], [1])
    rep = replay(g, Strategy("standard", [place(1)]))
    assert (rep.space, rep.time, rep.complete) == (1, 1, True)


def test_replay_pyramid2():
    g, b1, b2, apex = p2()
    rep = replay(g, Strategy("standard", [place(b1), place(b2), slide(b1, apex)]))
    assert (rep.space, rep.time) == (2, 3)
    assert not rep.complete  # b2 still pebbled
    rep = replay(g, Strategy("standard", [place(b1), place(b2), slide(b1, apex), remove(b2)]))
    assert rep.complete


def test_bw_tree_height1():
    g = binary_tree(1)
    l1, l2 = sorted(g.sources)
    root = next(iter(g.targets))
    s = Strategy("black_white", [Move("PlaceWhite", l2), place(l1), slide(l1, root), Move("RemoveWhite", l2)])
    rep = replay(g, s)
    assert rep.space == 2 and rep.complete


def test_replay_reports_index():
    g, b1, b2, apex = p2()
    s = Strategy("standard", [place(b1), slide(b1, apex), place(b2)])
    with pytest.raises(IllegalMove) as exc:
        replay(g, s)
    assert exc.value.index == 1


def test_terminal_requires_no_white():
    g = Dag.build(1, [], [1], [1])
    rep = replay(g, Strategy("bw", [place(1)]))
    assert rep.complete
    g2 = Dag.build(2, [(1, 2)], [1], [2])
    s = Strategy("bw", [Move("PlaceWhite", 1), place(2)])
    assert not replay(g2, s).complete


def test_strategy_round_trip():
    s = Strategy("black_white", [place(1), Move("SlideWhite", 3, 2)])
    assert Strategy.loads(s.dumps()) == s
    with pytest.raises(ValueError):
        Strategy.loads('{"game": "standard", "moves": [{"op": "Fly", "v": 1}]}')


def _random_walk(dag, game, steps, rng):
    """A random legal strategy, built by trying random moves."""
    cfg, moves = EMPTY, []
    ops = ["PlaceBlack", "RemoveBlack", "SlideBlack"]
    if game == "bw":
        ops += ["PlaceWhite", "RemoveWhite", "SlideWhite"]
    for _ in range(steps * 5):
        if len(moves) >= steps:
            break
        op = rng.choice(ops)
        v = rng.randint(1, dag.n)
        w = rng.randint(1, dag.n) if op.startswith("Slide") else None
        mv = Move(op, v, w)
        try:
            cfg = apply_move(dag, game, cfg, mv)
        except IllegalMove:
            continue
        moves.append(mv)
    return Strategy(game, moves)


@settings(max_examples=60, deadline=None)
@given(small_dags(max_nodes=6), st.sampled_from(["standard", "bw"]), st.randoms(use_true_random=False))
def test_sequentiality_census_and_determinism(d, game, rng):
    s = _random_walk(d, game, 25, rng)
    configs = configurations(d, s)
    for a, b in zip(configs, configs[1:]):
        assert abs(len(b) - len(a)) <= 1
        assert not (b.black & b.white)
    rep = replay(d, s)
    assert rep.space == max(census(configs))
    assert rep.time == len(s.moves)
    assert replay(d, s) == rep


@settings(max_examples=60, deadline=None)
@given(small_dags(max_nodes=8), st.sampled_from(["standard", "bw"]), st.randoms(use_true_random=False))
def test_frugality_matches_path_enumeration(d, game, rng):
    s = _random_walk(d, game, 20, rng)
    fr = frugality(d, s)
    assert (fr.some_path, fr.all_paths, fr.placements) == frugal_by_paths(d, configurations(d, s))


@pytest.mark.parametrize("h", [2, 3])
def test_frugality_on_solver_witnesses(h):
    g = pyramid(h)
    for game in ("standard", "bw"):
        s = min_moves(g, game, h).witness
        fr = frugality(g, s)
        assert (fr.some_path, fr.all_paths, fr.placements) == frugal_by_paths(g, configurations(g, s))


def test_frugality_exhaustive_up_to_12_nodes():
    rng = random.Random(7)
    for g in [pyramid(4), binary_tree(2)]:
        assert g.n <= 12
        for _ in range(30):
            s = _random_walk(g, "bw", 30, rng)
            fr = frugality(g, s)
            assert (fr.some_path, fr.all_paths, fr.placements) == frugal_by_paths(g, configurations(g, s))
    w = min_pebbles(pyramid(4)).witness
    assert frugality(pyramid(4), w).some_path


def test_game_parse():
    assert Game.parse("bw") is Game.BLACK_WHITE
    assert Game.parse("standard") is Game.STANDARD
    with pytest.raises(ValueError):
        Game.parse("chess")
