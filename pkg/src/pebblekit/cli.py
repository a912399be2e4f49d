"""pebblectl: generate graphs, solve, verify strategies, build reductions."""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from pathlib import Path

from . import generators as gen
from .engine import Game, IllegalMove, Strategy, replay
from .graph import GraphError, deserialize, serialize, validate
from .qbf import QbfSyntaxError, duplicate_formula, evaluate_qbf, gap_parameters, parse_qbf
from .reduction import (
    NODE_COUNT_CONSTANT, ReductionError, SynthesisError, build_reduction, node_envelope,
    synthesize_strategy,
)
from .solvers import StateSpaceLimitExceeded, check_witness, min_moves, min_pebbles

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INFEASIBLE = 2
EXIT_CAP = 3
EXIT_INPUT = 4


class InputError(Exception):
    pass


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _emit(args, report: dict, text_lines: list[str]) -> None:
    report["wall_clock"] = round(time.perf_counter() - args._t0, 4)
    if args.format == "text":
        print("\n".join(text_lines))
    else:
        print(json.dumps(report, indent=1, sort_keys=True))


def _game(value: str) -> Game:
    try:
        return Game.parse(value)
    except ValueError:
        raise InputError(f"unknown game {value!r}") from None


def _load_graph(path: str):
    text = _read(path)
    dag = deserialize(text)
    rep = validate(dag)
    if not rep.ok:
        raise InputError(f"invalid graph: {', '.join(sorted(rep.rules()))}")
    return dag, _digest(text)


# -- gen --------------------------------------------------------------------

def cmd_gen(args) -> int:
    fam = args.family.replace("-", "_")
    if fam == "pyramid":
        dag = gen.pyramid(args.height)
    elif fam == "road":
        dag = gen.road(args.width, args.depth, args.targets)
    elif fam == "binary_tree":
        dag = gen.binary_tree(args.height)
    elif fam == "hard":
        dag = gen.hard_family(args.n, args.k)
    elif fam == "hard_indeg2_standard":
        dag = gen.hard_family_indeg2_standard(args.n, args.k)
    elif fam == "hard_indeg2_bw":
        dag = gen.hard_family_indeg2_bw(args.n, args.k)
    else:
        raise InputError(f"unknown family {args.family!r}")
    fmt = "dot" if args.format == "dot" else "interchange"
    _write(args.out, serialize(dag, fmt))
    if args.dot:
        Path(args.dot).write_text(serialize(dag, "dot"))
    if args.out not in (None, "-"):
        print(f"wrote {dag.n} nodes, {len(dag.edges)} edges to {args.out}", file=sys.stderr)
    return EXIT_OK


# -- solve / verify ---------------------------------------------------------

def cmd_solve(args) -> int:
    dag, digest = _load_graph(args.graph)
    game = _game(args.game)
    objective = args.objective.replace("-", "_")
    if objective == "min_moves" and args.budget is None:
        raise InputError("min-moves needs --budget")
    if objective == "min_moves":
        res = min_moves(dag, game, args.budget, state_cap=args.state_cap)
    else:
        res = min_pebbles(dag, game, state_cap=args.state_cap, budget=args.budget)
    if res.feasible:
        check_witness(dag, res)
        if args.witness:
            Path(args.witness).write_text(res.witness.dumps() + "\n")
    report = {"command": "solve", "graph": args.graph, "input_digest": digest,
              "result": res.to_dict()}
    if args.witness:
        report["result"]["witness"] = args.witness
    lines = [
        f"objective: {objective}  game: {game.value}  budget: {res.budget}",
        f"optimum: {res.optimum if res.feasible else 'infeasible'}",
        f"explored states: {res.explored}",
    ]
    _emit(args, report, lines)
    return EXIT_OK if res.feasible else EXIT_INFEASIBLE


def cmd_verify(args) -> int:
    dag, digest = _load_graph(args.graph)
    try:
        strat = Strategy.loads(_read(args.strategy))
    except (ValueError, json.JSONDecodeError) as exc:
        raise InputError(str(exc)) from None
    try:
        rep = replay(dag, strat)
    except IllegalMove as exc:
        report = {"command": "verify", "legal": False, "index": exc.index, "reason": exc.reason,
                  "move": exc.move.to_dict() if exc.move else None}
        _emit(args, report, [f"illegal move at index {exc.index}: {exc.reason}"])
        return EXIT_INPUT
    report = {"command": "verify", "graph": args.graph, "input_digest": digest, "legal": True,
              "space": rep.space, "time": rep.time, "complete": rep.complete}
    _emit(args, report, [f"space: {rep.space}", f"time: {rep.time}", f"complete: {rep.complete}"])
    return EXIT_OK if rep.complete else EXIT_FAILED


# -- reduce / synth -----------------------------------------------------------

def _formula_and_params(args):
    text = _read(args.qbf)
    f = parse_qbf(text)
    if args.duplicate and args.duplicate > 1:
        f = duplicate_formula(f, args.duplicate)
    params = None
    if args.K is not None:
        K = args.K
    elif args.epsilon is not None:
        params = gap_parameters(args.epsilon, f.u, f.c)
        K = params.K
    else:
        K = 2
    if K < 2:
        raise InputError("K must be at least 2")
    return f, K, params, _digest(text)


def _build_report(f, K, params, dag) -> dict:
    env = node_envelope(K, f.u, f.c)
    rep = {
        "u": f.u, "c": f.c, "K": K, "nodes": dag.n, "edges": len(dag.edges),
        "envelope_K3_u3_plus_c": env, "envelope_ratio": round(dag.n / env, 3),
        "envelope_constant": NODE_COUNT_CONSTANT,
        "s_schedule": [3 * K * f.u + 4 * K + 1 - 3 * K * i for i in range(f.u + 1)],
    }
    if params is not None:
        rep["epsilon"] = params.epsilon
        rep["a"] = params.a
        rep["required_duplication"] = params.duplication
    return rep


def cmd_reduce(args) -> int:
    f, K, params, digest = _formula_and_params(args)
    dag, layout = build_reduction(f, K)
    if args.out:
        Path(args.out).write_text(serialize(dag, "dot" if args.format == "dot" else "interchange"))
    report = {"command": "reduce", "input_digest": digest, "build": _build_report(f, K, params, dag)}
    lines = [f"{k}: {v}" for k, v in report["build"].items()]
    code = EXIT_OK
    if args.synth:
        code = _synth(args, f, K, dag, layout, report, lines)
    _emit(args, report, lines)
    return code


def cmd_synth(args) -> int:
    f, K, params, digest = _formula_and_params(args)
    dag, layout = build_reduction(f, K)
    report = {"command": "synth", "input_digest": digest, "build": _build_report(f, K, params, dag)}
    lines: list[str] = []
    code = _synth(args, f, K, dag, layout, report, lines)
    _emit(args, report, lines)
    return code


def _synth(args, f, K, dag, layout, report, lines) -> int:
    policy = evaluate_qbf(f, allow_double_false=args.double_false)
    res = synthesize_strategy(dag, layout, f, policy)
    if args.strategy:
        Path(args.strategy).write_text(res.strategy.dumps() + "\n")
    report["synthesis"] = res.to_dict()
    ok = res.complete and res.space <= res.bound
    lines += [
        f"strategy: {res.time} moves, space {res.space} (bound 3Ku+4K+1 = {res.bound})",
        f"complete: {res.complete}  clause passes: {res.clause_passes}",
        "verified" if ok else "FAILED verification",
    ]
    return EXIT_OK if ok else EXIT_FAILED


# -- bench ------------------------------------------------------------------

def recurrence_T(k: int, x: float) -> float:
    return x ** k + sum((k - i) * x ** (i + 1) for i in range(k))


def cmd_bench(args) -> int:
    family = args.family.replace("-", "_")
    builders = {
        "hard": gen.hard_family,
        "hard_indeg2_standard": gen.hard_family_indeg2_standard,
        "hard_indeg2_bw": gen.hard_family_indeg2_bw,
    }
    if family not in builders:
        raise InputError(f"bench supports {sorted(builders)}")
    games = [Game.STANDARD, Game.BLACK_WHITE] if args.game == "both" else [_game(args.game)]
    rows = []
    for n in args.n:
        row = {"n": n, "k": args.k}
        try:
            dag = builders[family](n, args.k)
        except gen.ParameterError as exc:
            row["status"] = f"inadmissible: {exc}"
            rows.append(row)
            continue
        x = (n - args.k) / (2 * args.k)
        row["x"] = x
        row["lower_bound"] = 2 * x ** args.k
        row["recurrence_T"] = recurrence_T(args.k, x)
        row["status"] = "ok"
        for g in games:
            try:
                res = min_moves(dag, g, args.k, state_cap=args.state_cap)
                row[f"min_moves_{g.value}"] = res.optimum
                row[f"explored_{g.value}"] = res.explored
                if res.feasible:
                    check_witness(dag, res)
                    row[f"meets_bound_{g.value}"] = res.optimum >= row["lower_bound"]
            except StateSpaceLimitExceeded as exc:
                row[f"min_moves_{g.value}"] = None
                row["status"] = f"capped at {exc.limit} states"
        rows.append(row)
    fit = _fit_exponent(rows, games[0].value)
    report = {"command": "bench", "family": family, "k": args.k, "rows": rows, "fitted_exponent": fit}
    header = ["n", "x", "2x^k", "T(k)"] + [f"moves[{g.value}]" for g in games] + ["status"]
    lines = ["\t".join(header)]
    for r in rows:
        if "x" not in r:
            lines.append(f"{r['n']}\t-\t-\t-\t" + "\t".join("-" for _ in games) + f"\t{r['status']}")
            continue
        cells = [str(r["n"]), f"{r['x']:g}", f"{r['lower_bound']:g}", f"{r['recurrence_T']:g}"]
        cells += [str(r.get(f"min_moves_{g.value}")) for g in games]
        lines.append("\t".join(cells + [r["status"]]))
    if fit is not None:
        lines.append(f"fitted exponent (log-ratio, first vs last row): {fit:.3f}")
    _emit(args, report, lines)
    return EXIT_OK


def _fit_exponent(rows, game: str) -> float | None:
    pts = [(r["x"], r[f"min_moves_{game}"]) for r in rows if r.get(f"min_moves_{game}")]
    if len(pts) < 2 or pts[0][0] == pts[-1][0]:
        return None
    (x0, y0), (x1, y1) = pts[0], pts[-1]
    return math.log(y1 / y0) / math.log(x1 / x0)


# -- argument parsing ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "dot", "text"], default="text")
    common.add_argument("--seed", type=int, default=None, help="reserved; all commands are deterministic")
    common.add_argument("--state-cap", type=int, default=None,
                        help="explored-state cap (default: $PEBBLECTL_STATE_CAP or 50,000,000)")

    p = argparse.ArgumentParser(prog="pebblectl", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a graph family")
    g.add_argument("family", choices=["pyramid", "road", "binary-tree", "hard",
                                      "hard-indeg2-standard", "hard-indeg2-bw"])
    g.add_argument("--height", type=int)
    g.add_argument("--width", type=int)
    g.add_argument("--depth", type=int)
    g.add_argument("--targets", type=int, nargs="+", help="road output indices (1-based)")
    g.add_argument("--n", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--out", "-o", help="output file (default stdout)")
    g.add_argument("--dot", help="also write a DOT rendering here")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", parents=[common], help="exact min-pebbles / min-moves")
    s.add_argument("graph")
    s.add_argument("--game", default="standard")
    s.add_argument("--objective", choices=["min-pebbles", "min-moves"], default="min-pebbles")
    s.add_argument("--budget", type=int)
    s.add_argument("--witness", help="write the witness strategy here")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", parents=[common], help="replay a strategy")
    v.add_argument("graph")
    v.add_argument("strategy")
    v.set_defaults(func=cmd_verify)

    for name, func in (("reduce", cmd_reduce), ("synth", cmd_synth)):
        r = sub.add_parser(name, parents=[common], help=f"{name} a QDIMACS-subset formula")
        r.add_argument("qbf")
        r.add_argument("--K", type=int)
        r.add_argument("--epsilon", type=float)
        r.add_argument("--duplicate", type=int, default=1)
        r.add_argument("--double-false", action="store_true",
                       help="let universal blocks take the double-false shortcut when possible")
        r.add_argument("--strategy", help="write the synthesized strategy here")
        if name == "reduce":
            r.add_argument("--out", "-o", help="write the reduction graph here")
            r.add_argument("--synth", action="store_true", help="also synthesize and verify a strategy")
        r.set_defaults(func=func)

    b = sub.add_parser("bench", parents=[common], help="min-moves table for a hard family")
    b.add_argument("--family", default="hard")
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--n", type=int, nargs="+", required=True)
    b.add_argument("--game", default="both", help="standard, bw, or both")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._t0 = time.perf_counter()
    try:
        return args.func(args)
    except StateSpaceLimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except SynthesisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (InputError, GraphError, gen.ParameterError, QbfSyntaxError, ReductionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
