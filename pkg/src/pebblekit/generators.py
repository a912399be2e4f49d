"""Graph families: pyramids, road graphs, binary trees and the hard families."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph import Dag, GraphError, validate


class ParameterError(ValueError):
    """A family parameter violates its admissibility constraint."""


class GraphBuilder:
    """Append-only builder handing out dense 1-based node ids."""

    def __init__(self):
        self.labels: dict[int, str] = {}
        self.edges: set[tuple[int, int]] = set()
        self.n = 0

    def node(self, label: str | None = None) -> int:
        self.n += 1
        if label is not None:
            self.labels[self.n] = label
        return self.n

    def nodes(self, count: int, label: str | None = None) -> list[int]:
        return [self.node(None if label is None else f"{label}{i + 1}") for i in range(count)]

    def edge(self, u: int, v: int) -> None:
        self.edges.add((u, v))

    def pyramid(self, height: int, label: str = "pyr", base: Sequence[int] | None = None) -> list[list[int]]:
        """Add a pyramid; rows[0] is the base (width ``height``), rows[-1] == [apex].

        Node (t, c) has predecessors (t-1, c) and (t-1, c+1). When ``base`` is
        given those nodes are reused as row 0.
        """
        if height < 1:
            raise ParameterError("pyramid height must be >= 1")
        rows = [list(base) if base is not None else self.nodes(height, f"{label}.0.")]
        if len(rows[0]) != height:
            raise ParameterError("pyramid base width must equal its height")
        for t in range(1, height):
            row = self.nodes(height - t, f"{label}.{t}.")
            prev = rows[-1]
            for c, v in enumerate(row):
                self.edge(prev[c], v)
                self.edge(prev[c + 1], v)
            rows.append(row)
        return rows

    def band(self, inputs: Sequence[int], depth: int, label: str) -> list[list[int]]:
        """Layers of width w; node c reads c and c+1 of the layer below (last reads only itself)."""
        layers = [list(inputs)]
        w = len(inputs)
        for t in range(1, depth + 1):
            row = self.nodes(w, f"{label}.{t}.")
            prev = layers[-1]
            for c, v in enumerate(row):
                self.edge(prev[c], v)
                if c + 1 < w:
                    self.edge(prev[c + 1], v)
            layers.append(row)
        return layers

    def build(self, sources: Iterable[int] | None, targets: Iterable[int], *, max_indegree_2: bool = False) -> Dag:
        return Dag.build(self.n, self.edges, sources, targets, max_indegree_2=max_indegree_2, labels=self.labels)


def _checked(dag: Dag) -> Dag:
    rep = validate(dag)
    if not rep.ok:
        raise GraphError(f"internal consistency failure: {sorted(rep.rules())}")
    return dag


@dataclass(frozen=True)
class FamilyParams:
    family: str
    n: int | None = None
    k: int | None = None
    h: int | None = None
    w: int | None = None
    depth: int | None = None

    def build(self) -> Dag:
        if self.family == "pyramid":
            return pyramid(self.h)
        if self.family == "road":
            return road(self.w, self.depth)
        if self.family == "binary_tree":
            return binary_tree(self.h)
        if self.family == "hard":
            return hard_family(self.n, self.k)
        if self.family == "hard_indeg2_standard":
            return hard_family_indeg2_standard(self.n, self.k)
        if self.family == "hard_indeg2_bw":
            return hard_family_indeg2_bw(self.n, self.k)
        raise ParameterError(f"unknown family {self.family!r}")


def pyramid(h: int) -> Dag:
    """Height-h pyramid: h(h+1)/2 nodes, base row as sources, apex as target."""
    if h is None or h < 1:
        raise ParameterError("pyramid height must be >= 1")
    b = GraphBuilder()
    rows = b.pyramid(h, "p")
    return _checked(b.build(rows[0], rows[-1], max_indegree_2=True))


def binary_tree(h: int) -> Dag:
    """Complete binary tree of height h, leaves are sources, root is the target."""
    if h is None or h < 0:
        raise ParameterError("tree height must be >= 0")
    b = GraphBuilder()
    levels = _tree(b, h, "t")
    return _checked(b.build(levels[0], levels[-1], max_indegree_2=True))


def _tree(b: GraphBuilder, h: int, label: str) -> list[list[int]]:
    """levels[t] holds the height-t nodes; levels[t][0] roots the left-most height-t subtree."""
    levels = [b.nodes(2 ** h, f"{label}.0.")]
    for t in range(1, h + 1):
        row = b.nodes(2 ** (h - t), f"{label}.{t}.")
        for c, v in enumerate(row):
            b.edge(levels[-1][2 * c], v)
            b.edge(levels[-1][2 * c + 1], v)
        levels.append(row)
    return levels


@dataclass(frozen=True)
class RoadParts:
    inputs: list[int]
    layers: list[list[int]]
    outputs: list[int]
    out_rows: list[list[list[int]]]

    def output_rows(self, c: int) -> list[list[int]]:
        """Layered rows from the inputs up to output ``c`` (0-based)."""
        return self.layers + self.out_rows[c][1:]


def add_road(b: GraphBuilder, inputs: Sequence[int], depth: int, label: str) -> RoadParts:
    """Road gadget over existing ``inputs``: a band of ``depth`` layers, then one
    height-w pyramid per output, all sharing the top band layer as base."""
    w = len(inputs)
    layers = b.band(inputs, depth, f"{label}.band")
    outputs, out_rows = [], []
    for c in range(w):
        rows = b.pyramid(w, f"{label}.out{c + 1}", base=layers[-1])
        apex = rows[-1][0]
        b.labels[apex] = f"{label}.o{c + 1}"
        outputs.append(apex)
        out_rows.append(rows)
    return RoadParts(list(inputs), layers, outputs, out_rows)


def road_node_count(w: int, depth: int) -> int:
    return w * (depth + 1) + w * (w * (w - 1) // 2)


def road(w: int, depth: int | None = None, targets: Iterable[int] | None = None) -> Dag:
    """Road graph of width w.

    ``targets`` lists output indices (1-based, default ``[1]``). Node count is
    ``w*(depth+1) + w*w*(w-1)/2``.
    """
    if w is None or w < 2:
        raise ParameterError("road width must be >= 2")
    depth = 2 if depth is None else depth
    if depth < 0:
        raise ParameterError("road depth must be >= 0")
    outs = [1] if targets is None else sorted(set(targets))
    if not outs or any(not 1 <= o <= w for o in outs):
        raise ParameterError(f"road targets must be a nonempty subset of 1..{w}")
    b = GraphBuilder()
    inputs = b.nodes(w, "i")
    parts = add_road(b, inputs, depth, "road")
    for c, o in enumerate(parts.outputs):
        b.labels[o] = f"o{c + 1}"
    return _checked(b.build(inputs, [parts.outputs[o - 1] for o in outs], max_indegree_2=True))


def road_outputs(dag: Dag) -> list[int]:
    found = {int(t[1:]): v for v, t in dag.labels.items() if t.startswith("o") and t[1:].isdigit()}
    return [found[i] for i in sorted(found)]


# -- hard families ------------------------------------------------------------

def check_hard_params(n: int, k: int) -> None:
    if k is None or n is None:
        raise ParameterError("hard family needs n and k")
    if k < 2:
        raise ParameterError("hard family needs k >= 2")
    if k * k >= n:
        raise ParameterError(f"bound violated: need k < sqrt(n), got n={n}, k={k}")
    if (n - k) % (2 * k):
        raise ParameterError(f"divisibility violated: (n - k) mod 2k != 0 for n={n}, k={k}")


def hard_f(n: int, k: int, l: int) -> int:
    return (k - 1) + (l - 1) * ((n - k) // k) + 2


def hard_family_edges(n: int, k: int) -> set[tuple[int, int]]:
    x = (n - k) // (2 * k)
    edges = {(i, i + 1) for i in range(k - 1, n)}
    for l in range(2, k + 1):
        f = hard_f(n, k, l)
        for i in range(1, l):
            for r in range(1, x + 1):
                edges.add((i, f + 2 * r - 2))
    for l in range(1, k):
        f = hard_f(n, k, l)
        for r in range(0, x):
            edges.add((f - 2, f + 2 * r - 1))
    return edges


def hard_family(n: int, k: int) -> Dag:
    """H_{n,k}: sources v_1..v_{k-1}, single target v_n."""
    check_hard_params(n, k)
    labels = {i: f"v{i}" for i in range(1, n + 1)}
    dag = Dag.build(n, hard_family_edges(n, k), range(1, k), [n], labels=labels)
    return _checked(dag)


def _leveled_path(b: GraphBuilder, roots: Sequence[int], n: int, k: int) -> int:
    """Path over the remaining nodes, split into k segments of equal length L.

    In segment l the path runs in blocks of l nodes: the block's first node
    also reads the last node before the segment (levels 2..k-1), and its
    i-th follower reads ``roots[i-1]``. Returns the path's first node.
    """
    start = b.n + 1
    m = n - b.n
    seg = m // k
    path = b.nodes(m, "v")
    for u, v in zip(path, path[1:]):
        b.edge(u, v)
    for l in range(1, k + 1):
        first = (l - 1) * seg
        before = path[first - 1] if first else None
        for g in range(seg // l):
            blk = first + g * l
            if before is not None and 2 <= l <= k - 1:
                b.edge(before, path[blk])
            for i in range(1, l):
                b.edge(roots[i - 1], path[blk + i])
    return start


def check_indeg2_standard_params(n: int, k: int) -> None:
    if k is None or n is None or k < 2:
        raise ParameterError("indegree-2 standard family needs k >= 2")
    if 2 * k * k >= n:
        raise ParameterError(f"bound violated: need k < sqrt(n/2), got n={n}, k={k}")
    p = k * (k - 1) // 2
    if (n - p) % k:
        raise ParameterError(f"divisibility violated: (n - k(k-1)/2) mod k != 0 for n={n}, k={k}")
    if (n - p) // k < k:
        raise ParameterError("path too short: each segment needs at least k nodes")


def hard_family_indeg2_standard(n: int, k: int) -> Dag:
    """Indegree-2 variant: one height-(k-1) pyramid supplies roots r_1..r_{k-1}."""
    check_indeg2_standard_params(n, k)
    b = GraphBuilder()
    rows = b.pyramid(k - 1, "pyr")
    roots = [rows[i][0] for i in range(k - 1)]
    for i, r in enumerate(roots):
        b.labels[r] = f"r{i + 1}"
    head = _leveled_path(b, roots, n, k)
    assert b.n == n
    dag = b.build(list(rows[0]) + [head], [n], max_indegree_2=True)
    return _checked(dag)


def bw_tree_height(k: int) -> int:
    return 2 * k - 5


def check_indeg2_bw_params(n: int, k: int) -> None:
    if k is None or n is None or k < 3:
        raise ParameterError("black-white indegree-2 family needs k >= 3 (tree height 2k-5 >= 1)")
    size = 2 ** (bw_tree_height(k) + 1) - 1
    if (n - size) % k:
        raise ParameterError(f"divisibility violated: (n - {size}) mod k != 0 for n={n}, k={k}")
    if n <= size or (n - size) // k < k:
        raise ParameterError("path too short: each segment needs at least k nodes")


def hard_family_indeg2_bw(n: int, k: int) -> Dag:
    """Indegree-2 variant for the black-white game: a height-(2k-5) binary tree
    whose left-spine nodes at heights max(2i-3, 0) serve as r_i."""
    check_indeg2_bw_params(n, k)
    b = GraphBuilder()
    levels = _tree(b, bw_tree_height(k), "tree")
    roots = [levels[max(2 * i - 3, 0)][0] for i in range(1, k)]
    for i, r in enumerate(roots):
        b.labels[r] = f"r{i + 1}"
    head = _leveled_path(b, roots, n, k)
    assert b.n == n
    return _checked(b.build(list(levels[0]) + [head], [n], max_indegree_2=True))


def smallest_admissible_n(family: str, k: int) -> int:
    checks = {
        "hard": check_hard_params,
        "hard_indeg2_standard": check_indeg2_standard_params,
        "hard_indeg2_bw": check_indeg2_bw_params,
    }[family]
    for n in range(k + 1, 10 ** 6):
        try:
            checks(n, k)
            return n
        except ParameterError:
            continue
    raise ParameterError("no admissible n found")


__all__ = [
    "FamilyParams", "GraphBuilder", "ParameterError", "add_road", "binary_tree",
    "hard_family", "hard_family_indeg2_bw", "hard_family_indeg2_standard",
    "pyramid", "road", "road_node_count", "road_outputs", "smallest_admissible_n",
]
