"""Pebbling-game reduction from quantified 3-CNF with a K-pebble gap.

Every node group is K wide and groups are wired index-to-index, so each
move of the width-1 construction becomes K moves here. Quantifier block i
can use s_i = s - 3K(i-1) pebbles where s = 3Ku + 4K + 1, and holds 3K of
them while the blocks below it run.

Layout of one block (all edges are index-aligned between groups):

* ``xp``, ``d``: apexes of pyramids of heights s_i - l + 1 and s_i - K - l + 1.
* ``xbp``: universal blocks use pyramid apexes of height s_i - 2K - l + 1;
  existential blocks read ``xbp <- {feed, xp}`` where ``feed`` are such apexes.
* roads ``xp -> x`` and ``xbp -> xbar`` turn the inputs into literal outputs.
* universal chain: c <- {q'_{i+1}, xbar}, b <- {c, d}, a <- {b, xp},
  g <- {q'_{i+1}, xbp}, f <- {g, x}, qhat <- {f, a}.
* existential chain: e <- {q'_{i+1}, xbar}, c <- {e, d}, b <- {c, xbp},
  a <- {b, x}, qhat <- {a}.
* q_i is the apex of a height-K pyramid over single-predecessor copies of
  qhat, and q'_i <- {q_i, qhat_i}. The target is q_1.

The clause chain starts at K sources phat_0. Clause gadget j has three
K-groups nu reading pairs of literal outputs, a single-predecessor base row
beta, and a trapezoid from width 3K up to width K whose top row y feeds
phat_j <- {phat_{j-1}, y_j}. The last phat group plays the role of q'_{u+1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

from .engine import Game, Strategy, replay
from .generators import GraphBuilder, RoadParts, add_road
from .graph import Dag, validate
from .pebbler import Pebbler, diagonal_order, row_order
from .qbf import FORALL, Policy, PolicyNode, QbfFormula, check_policy, format_clause

ROAD_DEPTH = 2
NODE_COUNT_CONSTANT = 40


class ReductionError(ValueError):
    pass


class SynthesisError(ValueError):
    pass


@dataclass
class Block:
    index: int
    var: int
    quantifier: str
    s: int
    groups: dict[str, list[int]] = field(default_factory=dict)
    pyramids: dict[str, list[list[list[int]]]] = field(default_factory=dict)
    roads: dict[str, RoadParts] = field(default_factory=dict)
    q_rows: list[list[int]] = field(default_factory=list)

    @property
    def q(self) -> int:
        return self.q_rows[-1][0]


@dataclass
class ClauseGadget:
    index: int
    clause: int
    literals: tuple
    pairs: tuple
    nu: list[list[int]]
    rows: list[list[int]]
    phat: list[int]

    @property
    def top(self) -> list[int]:
        return self.rows[-1]


@dataclass
class GadgetLayout:
    K: int
    u: int
    c: int
    s: int
    schedule: list[int]
    blocks: list[Block]
    clauses: list[ClauseGadget]
    phat0: list[int]
    target: int
    notes: list[str] = field(default_factory=list)

    def block_of(self, var: int) -> Block:
        for b in self.blocks:
            if b.var == var:
                return b
        raise KeyError(var)

    def literal_road(self, lit) -> RoadParts:
        blk = self.block_of(lit[0])
        return blk.roads["x" if lit[1] else "xbar"]

    def groups(self) -> dict[str, list[int]]:
        """Flat map of every named group."""
        out = {"phat0": self.phat0, "target": [self.target]}
        for b in self.blocks:
            for name, nodes in b.groups.items():
                out[f"block{b.index}.{name}"] = nodes
            out[f"block{b.index}.x"] = b.roads["x"].outputs
            out[f"block{b.index}.xbar"] = b.roads["xbar"].outputs
        for g in self.clauses:
            for name, nodes in zip(("nuAB", "nuAC", "nuBC"), g.nu):
                out[f"clause{g.index}.{name}"] = nodes
            out[f"clause{g.index}.y"] = g.top
            out[f"clause{g.index}.phat"] = g.phat
        return out


def tri(h: int) -> int:
    return h * (h + 1) // 2


def schedule(K: int, u: int) -> list[int]:
    s = 3 * K * u + 4 * K + 1
    return [s - 3 * K * i for i in range(u + 1)]


def expected_node_count(K: int, u: int, c: int, quantifiers: list[str]) -> int:
    """Closed-form node count of :func:`build_reduction`."""
    road = K * ROAD_DEPTH + K * tri(K - 1)
    total = K  # phat0
    total += (c + 1) * (3 * K + 3 * K + sum(range(K, 3 * K)) + K)
    for i, q in enumerate(quantifiers, 1):
        s_i = schedule(K, u)[i - 1]
        for offset in (0, K, 2 * K):
            total += sum(tri(s_i - offset - l) for l in range(K))
        total += 2 * road
        total += 5 * K if q == FORALL else 4 * K + K  # chain (+ xbp nodes)
        total += K + tri(K)  # qhat, pyramid with its copied base
        if i >= 2:
            total += K
    return total


def node_envelope(K: int, u: int, c: int) -> int:
    return K ** 3 * (u ** 3 + c)


def build_reduction(f: QbfFormula, K: int) -> tuple[Dag, GadgetLayout]:
    if K < 2:
        raise ReductionError("K must be at least 2")
    u, c = f.u, f.c
    sched = schedule(K, u)
    b = GraphBuilder()
    blocks: list[Block] = []

    # variable gadgets
    for i, (q, var) in enumerate(f.prefix, 1):
        s_i = sched[i - 1]
        blk = Block(i, var, q, s_i)
        pre = f"B{i}"

        def pyramids(name: str, offset: int) -> list[int]:
            rows_l = [b.pyramid(s_i - offset - l, f"{pre}.{name}{l + 1}") for l in range(K)]
            blk.pyramids[name] = rows_l
            apexes = [r[-1][0] for r in rows_l]
            for l, v in enumerate(apexes):
                b.labels[v] = f"{pre}.{name}{l + 1}"
            return apexes

        blk.groups["xp"] = pyramids("xp", 0)
        blk.groups["d"] = pyramids("d", K)
        if q == FORALL:
            blk.groups["xbp"] = pyramids("xbp", 2 * K)
        else:
            blk.groups["feed"] = pyramids("feed", 2 * K)
            xbp = b.nodes(K, f"{pre}.xbp")
            for l in range(K):
                b.edge(blk.groups["feed"][l], xbp[l])
                b.edge(blk.groups["xp"][l], xbp[l])
            blk.groups["xbp"] = xbp
        blk.roads["x"] = add_road(b, blk.groups["xp"], ROAD_DEPTH, f"{pre}.x")
        blk.roads["xbar"] = add_road(b, blk.groups["xbp"], ROAD_DEPTH, f"{pre}.xbar")
        blocks.append(blk)
    by_var = {blk.var: blk for blk in blocks}

    def outputs(lit) -> list[int]:
        blk = by_var[lit[0]]
        return blk.roads["x" if lit[1] else "xbar"].outputs

    # clause chain; gadget 0 repeats clause 0
    phat0 = b.nodes(K, "phat0.")
    prev = phat0
    gadgets = []
    for j, ci in enumerate([0] + list(range(c))):
        lits = f.clauses[ci]
        pairs = ((0, 1), (0, 2), (1, 2))
        pre = f"C{j}"
        nu = []
        for gname, (x, y) in zip(("AB", "AC", "BC"), pairs):
            grp = b.nodes(K, f"{pre}.nu{gname}")
            for l in range(K):
                b.edge(outputs(lits[x])[l], grp[l])
                b.edge(outputs(lits[y])[l], grp[l])
            nu.append(grp)
        base = b.nodes(3 * K, f"{pre}.beta")
        for m, v in enumerate(nu[0] + nu[1] + nu[2]):
            b.edge(v, base[m])
        rows = [base]
        for t in range(1, 2 * K + 1):
            row = b.nodes(3 * K - t, f"{pre}.row{t}.")
            for k, v in enumerate(row):
                b.edge(rows[-1][k], v)
                b.edge(rows[-1][k + 1], v)
            rows.append(row)
        phat = b.nodes(K, f"phat{j + 1}.")
        for l in range(K):
            b.edge(prev[l], phat[l])
            b.edge(rows[-1][l], phat[l])
        gadgets.append(ClauseGadget(j, ci, lits, pairs, nu, rows, phat))
        prev = phat

    # quantifier chains, innermost first
    qprime = prev
    for blk in reversed(blocks):
        i, pre, grp = blk.index, f"B{blk.index}", blk.groups
        x, xbar = blk.roads["x"].outputs, blk.roads["xbar"].outputs

        def group(name: str, left: list[int], right: list[int] | None) -> list[int]:
            out = b.nodes(K, f"{pre}.{name}")
            for l in range(K):
                b.edge(left[l], out[l])
                if right is not None:
                    b.edge(right[l], out[l])
            grp[name] = out
            return out

        if blk.quantifier == FORALL:
            cc = group("c", qprime, xbar)
            bb = group("b", cc, grp["d"])
            aa = group("a", bb, grp["xp"])
            gg = group("g", qprime, grp["xbp"])
            ff = group("f", gg, x)
            group("qhat", ff, aa)
        else:
            ee = group("e", qprime, xbar)
            cc = group("c", ee, grp["d"])
            bb = group("b", cc, grp["xbp"])
            aa = group("a", bb, x)
            group("qhat", aa, None)
        qbase = group("qbase", grp["qhat"], None)
        blk.q_rows = b.pyramid(K, f"{pre}.qpyr", base=qbase)
        b.labels[blk.q] = f"q{i}"
        if i >= 2:
            qp = b.nodes(K, f"{pre}.qprime")
            for l in range(K):
                b.edge(blk.q, qp[l])
                b.edge(grp["qhat"][l], qp[l])
            grp["qprime"] = qp
            qprime = qp

    target = blocks[0].q
    dag = b.build(None, [target], max_indegree_2=True)
    rep = validate(dag)
    if not rep.ok:
        raise ReductionError(f"internal wiring self-check failed: {sorted(rep.rules())}")
    extra = dag.sources - set(phat0) - {
        r[0][k] for blk in blocks for rows_l in blk.pyramids.values() for r in rows_l for k in range(len(r[0]))
    }
    if extra:
        raise ReductionError(f"internal wiring self-check failed: stray sources {sorted(extra)[:5]}")
    layout = GadgetLayout(K, u, c, sched[0], sched, blocks, gadgets, phat0, target)
    layout.notes.append("q'_i reads both q_i and qhat_i (index-aligned); no separate p_j apex nodes are built")
    expected = expected_node_count(K, u, c, [q for q, _ in f.prefix])
    if expected != dag.n:
        raise ReductionError(f"node count {dag.n} disagrees with closed form {expected}")
    return dag, layout


# -- strategy synthesis -------------------------------------------------------

@dataclass
class SynthesisReport:
    strategy: Strategy
    space: int
    time: int
    complete: bool
    bound: int
    clause_passes: int
    clause_peak: int

    def to_dict(self) -> dict:
        return {
            "space": self.space, "time": self.time, "complete": self.complete,
            "bound": self.bound, "clause_passes": self.clause_passes,
            "clause_peak": self.clause_peak,
        }


class _Synth:
    def __init__(self, dag: Dag, layout: GadgetLayout, f: QbfFormula):
        self.dag = dag
        self.L = layout
        self.f = f
        self.K = layout.K
        self.p = Pebbler(dag, Game.STANDARD)
        self.state: dict[int, str] = {}
        self.passes = 0
        self.clause_peak = 0

    # helpers
    def pyramid_group(self, blk: Block, name: str) -> None:
        for rows in blk.pyramids[name]:
            self.p.sweep(diagonal_order(rows), keep=rows[-1])

    def road_outputs(self, road: RoadParts, consume: bool) -> None:
        """Pebble every output from the pebbled inputs; inputs survive unless ``consume``."""
        K = self.K
        for c in range(K):
            last = consume and c == K - 1
            order = [v for v in diagonal_order(road.output_rows(c), skip_base=True)
                     if v not in self.p.pebbled or v == road.outputs[c]]
            self.p.sweep(order, keep=[road.outputs[c]], consumable=road.inputs if last else ())

    def chain(self, targets: list[int], consumable: list[int]) -> None:
        self.p.sweep(targets, keep=targets, consumable=consumable)

    # recursion
    def qprime(self, i: int, node: PolicyNode | None) -> list[int]:
        """Pebble q'_i (or the end of the clause chain when i = u + 1)."""
        if i == self.L.u + 1:
            return self.clause_pass()
        blk = self.L.blocks[i - 1]
        self.block(blk, node)
        g = blk.groups
        self.p.sweep(g["qbase"], keep=g["qbase"])
        self.p.sweep(row_order(blk.q_rows), keep=[blk.q], consumable=g["qbase"])
        self.p.sweep(g["qprime"], keep=g["qprime"], consumable=g["qhat"] + [blk.q])
        return g["qprime"]

    def block(self, blk: Block, node: PolicyNode | None) -> None:
        if node is None or node.var != blk.var:
            raise SynthesisError(f"policy does not cover variable x{blk.var}")
        g, p = blk.groups, self.p
        outer = set(p.pebbled)
        road_x, road_xb = blk.roads["x"], blk.roads["xbar"]
        x, xbar = road_x.outputs, road_xb.outputs
        nxt = blk.index + 1
        self.pyramid_group(blk, "xp")
        self.pyramid_group(blk, "d")
        if blk.quantifier == FORALL:
            self.pyramid_group(blk, "xbp")
            if node.double_false:
                self.state[blk.var] = "FF"
                qp = self.qprime(nxt, node.children[None])
                self.road_outputs(road_xb, consume=False)
                self.chain(g["c"], xbar)
                self.chain(g["b"], g["c"] + g["d"])
                self.chain(g["a"], g["b"])
                self.chain(g["g"], qp + g["xbp"])
                self.road_outputs(road_x, consume=True)
                self.chain(g["f"], g["g"] + x)
                self.chain(g["qhat"], g["f"] + g["a"])
            else:
                self.road_outputs(road_xb, consume=True)
                self.state[blk.var] = "F"
                qp = self.qprime(nxt, node.children[False])
                self.chain(g["c"], qp)
                self.chain(g["b"], g["c"] + g["d"] + xbar)
                self.chain(g["a"], g["b"])
                self.road_outputs(road_x, consume=True)
                self.pyramid_group(blk, "xbp")
                self.state[blk.var] = "T"
                qp = self.qprime(nxt, node.children[True])
                self.chain(g["g"], qp)
                self.chain(g["f"], g["g"] + g["xbp"])
                self.chain(g["qhat"], g["f"] + g["a"] + x)
        else:
            self.pyramid_group(blk, "feed")
            self.chain(g["xbp"], g["feed"])
            if node.value:
                self.road_outputs(road_x, consume=True)
                self.state[blk.var] = "T"
                qp = self.qprime(nxt, node.children[True])
                self.road_outputs(road_xb, consume=False)
                self.chain(g["e"], qp + xbar)
                self.chain(g["c"], g["e"] + g["d"])
                self.chain(g["b"], g["c"] + g["xbp"])
                self.chain(g["a"], g["b"] + x)
                self.chain(g["qhat"], g["a"])
            else:
                self.road_outputs(road_xb, consume=True)
                self.state[blk.var] = "F"
                qp = self.qprime(nxt, node.children[False])
                self.chain(g["e"], qp)
                self.chain(g["c"], g["e"] + g["d"] + xbar)
                self.pyramid_group(blk, "feed")
                self.chain(g["xbp"], g["feed"])
                self.chain(g["b"], g["c"])
                self.road_outputs(road_x, consume=True)
                self.chain(g["a"], g["b"] + g["xbp"] + x)
                self.chain(g["qhat"], g["a"])
        del self.state[blk.var]
        held = set(p.pebbled)
        if held != set(g["qhat"]) | outer:
            raise SynthesisError(f"block {blk.index} left unexpected pebbles")

    def literal_is_true(self, lit) -> bool:
        st = self.state[lit[0]]
        return (st == "T" and lit[1]) or (st == "F" and not lit[1])

    def clause_pass(self) -> list[int]:
        self.passes += 1
        base = len(self.p)
        prev = None
        for gad in self.L.clauses:
            self.clause(gad, prev)
            if prev is None:
                self.p.sweep(self.L.phat0, keep=self.L.phat0)
                prev = self.L.phat0
            self.chain(gad.phat, prev + gad.top)
            prev = gad.phat
        self.clause_peak = max(self.clause_peak, self.p.peak - base)
        return prev

    def clause(self, gad: ClauseGadget, prev) -> None:
        lits = gad.literals
        false_lits = []
        for lit in lits:
            if not self.literal_is_true(lit) and lit not in false_lits:
                false_lits.append(lit)
        best = None
        start = self.p.snapshot()
        saved_peak = self.p.peak
        for prod in permutations(false_lits):
            for gorder in permutations(range(3)):
                self.p.peak = len(self.p)
                self._clause_body(gad, prod, gorder)
                local = self.p.peak
                if best is None or local < best[0]:
                    best = (local, prod, gorder)
                self.p.restore(start)
        self.p.peak = saved_peak
        self._clause_body(gad, best[1], best[2])

    def _clause_body(self, gad: ClauseGadget, prod, gorder) -> None:
        L = self.L
        for lit in prod:
            self.road_outputs(L.literal_road(lit), consume=False)
        produced = set()
        for lit in prod:
            produced.update(L.literal_road(lit).outputs)
        order = [v for gi in gorder for v in gad.nu[gi]]
        self.p.sweep(order, keep=order, consumable=sorted(produced))
        self.p.sweep(gad.rows[0], keep=gad.rows[0], consumable=order)
        self.p.sweep(row_order(gad.rows), keep=gad.top, consumable=gad.rows[0])


def synthesize_strategy(
    dag: Dag,
    layout: GadgetLayout,
    f: QbfFormula,
    policy: Policy,
) -> SynthesisReport:
    """Strategy pebbling the reduction graph of a true formula within 3Ku + 4K + 1."""
    bad = check_policy(f, policy)
    if bad is not None:
        asg, j = bad
        shown = ", ".join(f"x{v}={'-' if val is None else int(val)}" for v, val in sorted(asg.items()))
        raise SynthesisError(f"clause {j + 1} {format_clause(f, j)} is falsified under {shown}")
    syn = _Synth(dag, layout, f)
    blk = layout.blocks[0]
    syn.block(blk, policy.root)
    g = blk.groups
    syn.p.sweep(g["qbase"], keep=g["qbase"], consumable=g["qhat"])
    syn.p.sweep(row_order(blk.q_rows), keep=[blk.q], consumable=g["qbase"])
    strat = syn.p.strategy()
    rep = replay(dag, strat)
    return SynthesisReport(strat, rep.space, rep.time, rep.complete, layout.s, syn.passes, syn.clause_peak)
