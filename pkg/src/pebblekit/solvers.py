"""Exact minimum-space and minimum-time pebbling by breadth-first search.

States are encoded as ``black | white << n`` over bit ``v - 1`` for node v.
Successors are generated in increasing node order so witnesses are
reproducible.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass

from .engine import Configuration, Game, Move, Strategy, replay
from .graph import Dag, validate

DEFAULT_STATE_CAP = 50_000_000


class StateSpaceLimitExceeded(RuntimeError):
    def __init__(self, limit: int):
        self.limit = limit
        super().__init__(f"explored-state cap of {limit} exceeded")


@dataclass(frozen=True)
class SolveRequest:
    dag: Dag
    game: Game = Game.STANDARD
    budget: int | None = None
    objective: str = "min_pebbles"

    def __post_init__(self):
        if self.objective not in ("min_pebbles", "min_moves"):
            raise ValueError(f"unknown objective {self.objective!r}")
        if self.objective == "min_moves" and self.budget is None:
            raise ValueError("min_moves needs a pebble budget")
        if self.budget is not None and self.budget < 1:
            raise ValueError("budget must be at least 1")


@dataclass
class SolveResult:
    objective: str
    game: Game
    optimum: int | None
    witness: Strategy | None
    explored: int
    feasible: bool
    budget: int | None = None

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "game": self.game.value,
            "budget": self.budget,
            "optimum": self.optimum,
            "feasible": self.feasible,
            "explored": self.explored,
            "witness": self.witness.to_dict() if self.witness else None,
        }


def default_state_cap() -> int:
    return int(os.environ.get("PEBBLECTL_STATE_CAP", DEFAULT_STATE_CAP))


def canonical_encode(config: Configuration, n: int) -> int:
    black = 0
    for v in config.black:
        black |= 1 << (v - 1)
    white = 0
    for v in config.white:
        white |= 1 << (v - 1)
    return black | (white << n)


def canonical_decode(key: int, n: int) -> Configuration:
    full = (1 << n) - 1
    b, w = key & full, key >> n
    return Configuration(
        frozenset(i + 1 for i in range(n) if b >> i & 1),
        frozenset(i + 1 for i in range(n) if w >> i & 1),
    )


class _Tables:
    def __init__(self, dag: Dag, game: Game):
        n = dag.n
        self.n = n
        self.bw = game is Game.BLACK_WHITE
        self.pred = [0] * n
        self.pred_nodes: list[tuple[int, ...]] = []
        self.succ: list[tuple[int, ...]] = []
        self.source = [False] * n
        for v in dag.nodes:
            i = v - 1
            for u in dag.pred_list(v):
                self.pred[i] |= 1 << (u - 1)
            self.pred_nodes.append(tuple(u - 1 for u in dag.pred_list(v)))
            self.succ.append(tuple(w - 1 for w in dag.succ_list(v)))
            self.source[i] = v in dag.sources
        self.goal = sum(1 << (t - 1) for t in dag.targets)
        # White pebbles on sources or on nodes without successors never help
        # (swap for a black pebble, or drop the placement and its removal).
        self.white_ok = [bool(self.succ[i]) and not self.source[i] for i in range(n)]

    def successors(self, key: int, budget: int):
        n = self.n
        full = (1 << n) - 1
        b = key & full
        wt = key >> n
        p = b | wt
        room = bin(p).count("1") < budget
        pred, succ, source = self.pred, self.succ, self.source
        for i in range(n):
            bit = 1 << i
            if b & bit:
                yield ("RemoveBlack", i, None), key ^ bit
                for j in succ[i]:
                    jb = 1 << j
                    if not p & jb and not pred[j] & ~p:
                        yield ("SlideBlack", i, j), key ^ bit ^ jb
            elif wt & bit:
                if source[i] or not pred[i] & ~p:
                    yield ("RemoveWhite", i, None), key ^ (bit << n)
                for j in self.pred_nodes[i]:
                    jb = 1 << j
                    if not p & jb and not (pred[i] & ~jb) & ~p:
                        yield ("SlideWhite", i, j), key ^ (bit << n) ^ (jb << n)
            elif room:
                if source[i] or not pred[i] & ~p:
                    yield ("PlaceBlack", i, None), key | bit
                if self.bw and self.white_ok[i]:
                    yield ("PlaceWhite", i, None), key | (bit << n)


def _to_move(t) -> Move:
    op, i, j = t
    return Move(op, i + 1, None if j is None else j + 1)


def min_moves(
    dag: Dag,
    game: "Game | str" = Game.STANDARD,
    budget: int = 1,
    *,
    state_cap: int | None = None,
) -> SolveResult:
    """Fewest moves reaching the terminal configuration with at most ``budget`` pebbles."""
    game = Game.parse(game)
    if budget < 1:
        raise ValueError("budget must be at least 1")
    cap = default_state_cap() if state_cap is None else state_cap
    tab = _Tables(dag, game)
    goal = tab.goal
    parent: dict[int, tuple[int, tuple] | None] = {0: None}
    queue = deque([0])
    found = goal == 0
    while queue and not found:
        key = queue.popleft()
        for mv, nxt in tab.successors(key, budget):
            if nxt in parent:
                continue
            parent[nxt] = (key, mv)
            if nxt == goal:
                found = True
                break
            if len(parent) > cap:
                raise StateSpaceLimitExceeded(cap)
            queue.append(nxt)
    if not found:
        return SolveResult("min_moves", game, None, None, len(parent), False, budget)
    moves = []
    key = goal
    while parent[key] is not None:
        prev, mv = parent[key]
        moves.append(_to_move(mv))
        key = prev
    moves.reverse()
    return SolveResult("min_moves", game, len(moves), Strategy(game, moves), len(parent), True, budget)


def space_lower_bound(dag: Dag) -> int:
    """max(|T|, largest indegree among target ancestors); every such node gets pebbled."""
    relevant = dag.ancestors(dag.targets)
    return max([1, len(dag.targets)] + [dag.indegree(v) for v in relevant])


def min_pebbles(
    dag: Dag,
    game: "Game | str" = Game.STANDARD,
    *,
    state_cap: int | None = None,
    start: int | None = None,
    budget: int | None = None,
) -> SolveResult:
    """Smallest budget admitting a complete strategy, with a min-move witness at it.

    With ``budget`` the search stops there and reports infeasible if nothing fits.
    """
    game = Game.parse(game)
    explored = 0
    s = space_lower_bound(dag) if start is None else start
    while True:
        if budget is not None and s > budget:
            return SolveResult("min_pebbles", game, None, None, explored, False, budget)
        res = min_moves(dag, game, s, state_cap=state_cap)
        explored += res.explored
        if res.feasible:
            return SolveResult("min_pebbles", game, s, res.witness, explored, True, s)
        s += 1


def solve(req: SolveRequest, *, state_cap: int | None = None) -> SolveResult:
    report = validate(req.dag)
    if not report.ok:
        raise ValueError(f"invalid graph: {sorted(report.rules())}")
    if req.objective == "min_moves":
        return min_moves(req.dag, req.game, req.budget, state_cap=state_cap)
    return min_pebbles(req.dag, req.game, state_cap=state_cap, budget=req.budget)


def check_witness(dag: Dag, result: SolveResult) -> None:
    """Raise AssertionError unless the witness replays to the reported optimum."""
    if not result.feasible:
        return
    rep = replay(dag, result.witness)
    assert rep.complete, "witness does not finish in the terminal configuration"
    if result.objective == "min_moves":
        assert rep.time == result.optimum, (rep.time, result.optimum)
        assert rep.space <= result.budget
    else:
        assert rep.space <= result.optimum
