"""Incremental strategy construction with peak tracking.

:class:`Pebbler` applies moves one at a time through the game rules, so an
illegal schedule fails at the offending move rather than at replay time.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Sequence

from .engine import EMPTY, Configuration, Game, Move, Strategy, apply_move
from .graph import Dag


class Pebbler:
    def __init__(self, dag: Dag, game: Game = Game.STANDARD, *, check: bool = True):
        self.dag = dag
        self.game = Game.parse(game)
        self.check = check
        self.config = EMPTY
        self.moves: list[Move] = []
        self.peak = 0

    # -- primitive moves ------------------------------------------------------

    def _do(self, move: Move) -> None:
        if self.check:
            self.config = apply_move(self.dag, self.game, self.config, move)
        else:
            b = set(self.config.black)
            if move.op == "PlaceBlack":
                b.add(move.v)
            elif move.op == "RemoveBlack":
                b.discard(move.v)
            else:
                b.discard(move.v)
                b.add(move.w)
            self.config = Configuration(frozenset(b), self.config.white)
        self.moves.append(move)
        self.peak = max(self.peak, len(self.config))

    def place(self, v: int) -> None:
        self._do(Move("PlaceBlack", v))

    def remove(self, v: int) -> None:
        self._do(Move("RemoveBlack", v))

    def slide(self, v: int, w: int) -> None:
        self._do(Move("SlideBlack", v, w))

    def remove_all(self, nodes: Iterable[int]) -> None:
        for v in nodes:
            if v in self.config.black:
                self.remove(v)

    @property
    def pebbled(self) -> frozenset[int]:
        return self.config.pebbled

    def __len__(self) -> int:
        return len(self.config)

    # -- snapshots --------------------------------------------------------------

    def snapshot(self):
        return len(self.moves), self.config, self.peak

    def restore(self, snap) -> None:
        n, config, peak = snap
        del self.moves[n:]
        self.config = config
        self.peak = peak

    def strategy(self) -> Strategy:
        return Strategy(self.game, list(self.moves))

    # -- schedules --------------------------------------------------------------

    def sweep(
        self,
        order: Sequence[int],
        keep: Iterable[int] = (),
        consumable: Iterable[int] = (),
    ) -> int:
        """Pebble ``order`` in sequence and return the peak reached.

        A predecessor that is in ``order`` or ``consumable`` loses its pebble
        once its last consumer is pebbled, by sliding when possible. Nodes in
        ``keep`` and pebbles outside both sets are never touched.
        """
        keep = set(keep)
        region = set(order)
        owned = region | set(consumable)
        pending: Counter[int] = Counter()
        for v in order:
            for p in self.dag.pred_list(v):
                if p in owned:
                    pending[p] += 1
        start_peak = self.peak
        self.peak = len(self.config)
        for v in order:
            preds = self.dag.pred_list(v)
            dying = [p for p in preds if p in owned and pending[p] == 1 and p not in keep]
            if dying:
                self.slide(dying[0], v)
            else:
                self.place(v)
            for p in preds:
                if p in owned:
                    pending[p] -= 1
            for p in dying[1:]:
                self.remove(p)
        for v in sorted(owned - keep):
            if pending[v] == 0 and v in self.config.black:
                self.remove(v)
        local = self.peak
        self.peak = max(start_peak, local)
        return local


def diagonal_order(rows: Sequence[Sequence[int]], skip_base: bool = False) -> list[int]:
    """Anti-diagonal order for layered rows where (t, c) reads (t-1, c) and (t-1, c+1).

    From scratch this pebbles a height-h pyramid with h pebbles.
    """
    cells = [
        (c + t, t, v)
        for t, row in enumerate(rows)
        if not (skip_base and t == 0)
        for c, v in enumerate(row)
    ]
    cells.sort()
    return [v for _, _, v in cells]


def row_order(rows: Sequence[Sequence[int]], skip_base: bool = True) -> list[int]:
    return [v for t, row in enumerate(rows) if not (skip_base and t == 0) for v in row]


def pebble_pyramid(dag: Dag, rows: Sequence[Sequence[int]]) -> Strategy:
    """Complete standard-game strategy for a standalone pyramid given its rows."""
    p = Pebbler(dag)
    p.sweep(diagonal_order(rows), keep=rows[-1])
    return p.strategy()
