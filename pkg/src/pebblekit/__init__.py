"""Pebble-game graphs, exact solvers, hard families and the QBF reduction."""

from .engine import Configuration, Game, IllegalMove, Move, Strategy, apply_move, frugality, replay
from .graph import Dag, GraphError, deserialize, serialize, validate
from .solvers import SolveRequest, SolveResult, StateSpaceLimitExceeded, min_moves, min_pebbles, solve

__version__ = "0.1.0"

__all__ = [
    "Configuration", "Dag", "Game", "GraphError", "IllegalMove", "Move",
    "SolveRequest", "SolveResult", "StateSpaceLimitExceeded", "Strategy",
    "apply_move", "deserialize", "frugality", "min_moves", "min_pebbles",
    "replay", "serialize", "solve", "validate",
]
