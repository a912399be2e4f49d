"""Rules of the standard and black-white pebble games.

Configurations are pairs of frozensets; strategies are move lists replayed
from the empty board. A slide counts as a single move.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .graph import Dag


class Game(str, Enum):
    STANDARD = "standard"
    BLACK_WHITE = "black_white"

    @classmethod
    def parse(cls, value: "str | Game") -> "Game":
        if isinstance(value, Game):
            return value
        aliases = {"bw": cls.BLACK_WHITE, "black-white": cls.BLACK_WHITE, "black": cls.STANDARD}
        return aliases.get(value) or cls(value)


OPS = ("PlaceBlack", "RemoveBlack", "SlideBlack", "PlaceWhite", "RemoveWhite", "SlideWhite")
_SLIDES = ("SlideBlack", "SlideWhite")


class IllegalMove(Exception):
    def __init__(self, reason: str, index: int | None = None, move: "Move | None" = None):
        self.reason = reason
        self.index = index
        self.move = move
        where = f"move {index}: " if index is not None else ""
        super().__init__(f"{where}{reason}")


@dataclass(frozen=True)
class Move:
    """One pebbling move.

    For slides ``v`` is the node the pebble leaves and ``w`` the node it
    lands on. A black slide follows an edge ``(v, w)``; a white slide runs
    against an edge ``(w, v)``.
    """

    op: str
    v: int
    w: int | None = None

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"unknown move kind {self.op!r}")
        if (self.op in _SLIDES) != (self.w is not None):
            raise ValueError(f"{self.op} takes {'two' if self.op in _SLIDES else 'one'} operand(s)")

    def to_dict(self) -> dict:
        d = {"op": self.op, "v": self.v}
        if self.w is not None:
            d["w"] = self.w
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Move":
        return cls(d["op"], int(d["v"]), None if d.get("w") is None else int(d["w"]))

    def __str__(self) -> str:
        return f"{self.op}({self.v})" if self.w is None else f"{self.op}({self.v}->{self.w})"


def place(v: int) -> Move:
    return Move("PlaceBlack", v)


def remove(v: int) -> Move:
    return Move("RemoveBlack", v)


def slide(v: int, w: int) -> Move:
    return Move("SlideBlack", v, w)


@dataclass(frozen=True)
class Configuration:
    black: frozenset[int] = frozenset()
    white: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.black & self.white:
            raise ValueError("a node cannot carry both a black and a white pebble")

    @property
    def pebbled(self) -> frozenset[int]:
        return self.black | self.white

    def __len__(self) -> int:
        return len(self.black) + len(self.white)


EMPTY = Configuration()


@dataclass
class Strategy:
    game: Game
    moves: list[Move] = field(default_factory=list)

    def __post_init__(self):
        self.game = Game.parse(self.game)

    def __len__(self) -> int:
        return len(self.moves)

    def to_dict(self) -> dict:
        return {"game": self.game.value, "moves": [m.to_dict() for m in self.moves]}

    def dumps(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "Strategy":
        try:
            return cls(Game.parse(d["game"]), [Move.from_dict(m) for m in d["moves"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed strategy document: {exc}") from exc

    @classmethod
    def loads(cls, text: str) -> "Strategy":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class CostReport:
    space: int
    time: int
    complete: bool
    final: Configuration = EMPTY


def _preds_ok(dag: Dag, v: int, pebbled: frozenset[int], skip: int | None = None) -> bool:
    return all(u in pebbled for u in dag.pred_list(v) if u != skip)


def apply_move(dag: Dag, game: "Game | str", config: Configuration, move: Move) -> Configuration:
    """Return the successor configuration or raise :class:`IllegalMove`."""
    game = Game.parse(game)
    op, v, w = move.op, move.v, move.w
    for node in (v, w):
        if node is not None and not 1 <= node <= dag.n:
            raise IllegalMove(f"unknown node {node}", move=move)
    black, white = config.black, config.white
    pebbled = black | white
    if game is Game.STANDARD and op.endswith("White"):
        raise IllegalMove("white pebbles are not part of the standard game", move=move)

    if op == "PlaceBlack":
        if v in pebbled:
            raise IllegalMove(f"node {v} already pebbled", move=move)
        if v not in dag.sources and not _preds_ok(dag, v, pebbled):
            raise IllegalMove(f"placement on non-source {v} needs all predecessors pebbled", move=move)
        return Configuration(black | {v}, white)
    if op == "RemoveBlack":
        if v not in black:
            raise IllegalMove(f"no black pebble on {v} to remove", move=move)
        return Configuration(black - {v}, white)
    if op == "SlideBlack":
        if v not in black:
            raise IllegalMove(f"no black pebble on {v} to slide", move=move)
        if (v, w) not in dag.edges:
            raise IllegalMove(f"slide needs edge ({v}, {w})", move=move)
        if w in pebbled:
            raise IllegalMove(f"slide target {w} already pebbled", move=move)
        if not _preds_ok(dag, w, pebbled):
            raise IllegalMove(f"slide onto {w} needs all predecessors pebbled", move=move)
        return Configuration((black - {v}) | {w}, white)
    if op == "PlaceWhite":
        if v in pebbled:
            raise IllegalMove(f"white placement needs an empty vertex, {v} is pebbled", move=move)
        return Configuration(black, white | {v})
    if op == "RemoveWhite":
        if v not in white:
            raise IllegalMove(f"no white pebble on {v} to remove", move=move)
        if v not in dag.sources and not _preds_ok(dag, v, pebbled):
            raise IllegalMove(f"white removal from non-source {v} needs all predecessors pebbled", move=move)
        return Configuration(black, white - {v})
    # SlideWhite: the white pebble leaves v and lands on its predecessor w.
    if v not in white:
        raise IllegalMove(f"no white pebble on {v} to slide", move=move)
    if (w, v) not in dag.edges:
        raise IllegalMove(f"white slide needs edge ({w}, {v})", move=move)
    if w in pebbled:
        raise IllegalMove(f"white slide target {w} already pebbled", move=move)
    if not _preds_ok(dag, v, pebbled, skip=w):
        raise IllegalMove(f"white slide off {v} needs its other predecessors pebbled", move=move)
    return Configuration(black, (white - {v}) | {w})


def configurations(dag: Dag, strategy: Strategy) -> list[Configuration]:
    """P_0 .. P_tau for a legal strategy."""
    out = [EMPTY]
    cur = EMPTY
    for i, m in enumerate(strategy.moves):
        try:
            cur = apply_move(dag, strategy.game, cur, m)
        except IllegalMove as exc:
            raise IllegalMove(exc.reason, i, m) from None
        out.append(cur)
    return out


def is_terminal(dag: Dag, config: Configuration) -> bool:
    return config.black == dag.targets and not config.white


def replay(dag: Dag, strategy: Strategy) -> CostReport:
    cur = EMPTY
    space = 0
    for i, m in enumerate(strategy.moves):
        try:
            cur = apply_move(dag, strategy.game, cur, m)
        except IllegalMove as exc:
            raise IllegalMove(exc.reason, i, m) from None
        space = max(space, len(cur))
    return CostReport(space, len(strategy.moves), is_terminal(dag, cur), cur)


# -- frugality ---------------------------------------------------------------

def _reach_masks(dag: Dag) -> list[int]:
    """reach[v]: bitmask of nodes reachable from v, v included."""
    reach = [0] * (dag.n + 1)
    for v in reversed(dag.topological_order):
        m = 1 << v
        for w in dag.succ_list(v):
            m |= reach[w]
        reach[v] = m
    return reach


def _on_target_paths(dag: Dag, v: int, reach: list[int], target_mask: int) -> int:
    """Nodes lying on at least one path from v to a target."""
    out = 0
    r = reach[v]
    for u in dag.nodes:
        if r >> u & 1 and reach[u] & target_mask:
            out |= 1 << u
    return out


def _all_paths_blocked(dag: Dag, v: int, pebbled: frozenset[int]) -> bool:
    if v in pebbled:
        return True
    stack, seen = [v], {v}
    while stack:
        x = stack.pop()
        if x in dag.targets:
            return False
        for y in dag.succ_list(x):
            if y not in seen and y not in pebbled:
                seen.add(y)
                stack.append(y)
    return True


@dataclass(frozen=True)
class FrugalityReport:
    some_path: bool
    all_paths: bool
    placements: bool

    @property
    def frugal(self) -> bool:
        return self.some_path and self.all_paths and self.placements


def frugality(dag: Dag, strategy: Strategy) -> FrugalityReport:
    """Check the three frugality conditions by reachability.

    1. once v has been pebbled, some path from v to a target carries a pebble;
    2. after v's last pebbling, every such path carries a pebble;
    3. v (non-target) gains pebbles no more often than its successors do.
    """
    configs = configurations(dag, strategy)
    reach = _reach_masks(dag)
    tmask = sum(1 << t for t in dag.targets)
    first: dict[int, int] = {}
    last: dict[int, int] = {}
    gains = [0] * (dag.n + 1)
    for t in range(1, len(configs)):
        for v in configs[t].pebbled - configs[t - 1].pebbled:
            first.setdefault(v, t)
            last[v] = t
            gains[v] += 1
    some = allp = True
    for v, t0 in first.items():
        if not reach[v] & tmask:
            continue
        window = _on_target_paths(dag, v, reach, tmask)
        for t in range(t0 + 1, len(configs)):
            peb = configs[t].pebbled
            if not any(window >> u & 1 for u in peb):
                some = False
            if t > last[v] and not _all_paths_blocked(dag, v, peb):
                allp = False
    plc = all(
        gains[v] <= sum(gains[w] for w in dag.succ_list(v))
        for v in first if v not in dag.targets
    )
    return FrugalityReport(some, allp, plc)


def is_frugal(dag: Dag, strategy: Strategy) -> bool:
    return frugality(dag, strategy).frugal


def census(configs: Sequence[Configuration]) -> list[int]:
    return [len(c) for c in configs]


def strategy_from_moves(game: "Game | str", moves: Iterable[Move]) -> Strategy:
    return Strategy(Game.parse(game), list(moves))
