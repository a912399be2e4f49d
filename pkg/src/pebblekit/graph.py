"""Immutable DAG model, validation, and (de)serialization."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

FORMAT_VERSION = 1


class GraphError(ValueError):
    """Raised for malformed graphs or interchange documents."""


@dataclass(frozen=True)
class Violation:
    rule: str
    where: object


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}


@dataclass(frozen=True, eq=False)
class Dag:
    """A DAG on nodes ``1..n`` with designated sources and targets.

    Construction does not reject bad input; call :func:`validate` for that.
    Duplicate edges are collapsed since the edge set is a set.
    """

    n: int
    edges: frozenset[tuple[int, int]]
    sources: frozenset[int]
    targets: frozenset[int]
    max_indegree_2: bool = False
    labels: dict[int, str] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]],
        sources: Iterable[int] | None = None,
        targets: Iterable[int] | None = None,
        *,
        max_indegree_2: bool = False,
        labels: dict[int, str] | None = None,
    ) -> "Dag":
        """Build a DAG; sources/targets default to indegree-0/outdegree-0 nodes."""
        if n < 1:
            raise GraphError("a graph needs at least one node")
        edge_set = frozenset((int(u), int(v)) for u, v in edges)
        for u, v in edge_set:
            if not (1 <= u <= n and 1 <= v <= n):
                raise GraphError(f"edge ({u}, {v}) references an unknown node")
        if sources is None:
            has_in = {v for _, v in edge_set}
            sources = [v for v in range(1, n + 1) if v not in has_in]
        if targets is None:
            has_out = {u for u, _ in edge_set}
            targets = [v for v in range(1, n + 1) if v not in has_out]
        return cls(
            n,
            edge_set,
            frozenset(sources),
            frozenset(targets),
            max_indegree_2,
            dict(labels or {}),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dag):
            return NotImplemented
        return (
            self.n == other.n
            and self.edges == other.edges
            and self.sources == other.sources
            and self.targets == other.targets
            and self.max_indegree_2 == other.max_indegree_2
            and self.labels == other.labels
        )

    def __hash__(self) -> int:
        return hash((self.n, self.edges, self.sources, self.targets))

    @property
    def nodes(self) -> range:
        return range(1, self.n + 1)

    @cached_property
    def _pred(self) -> tuple[tuple[int, ...], ...]:
        pred: list[list[int]] = [[] for _ in range(self.n + 1)]
        for u, v in self.edges:
            pred[v].append(u)
        return tuple(tuple(sorted(p)) for p in pred)

    @cached_property
    def _succ(self) -> tuple[tuple[int, ...], ...]:
        succ: list[list[int]] = [[] for _ in range(self.n + 1)]
        for u, v in self.edges:
            succ[u].append(v)
        return tuple(tuple(sorted(s)) for s in succ)

    def _check(self, v: int) -> None:
        if not (1 <= v <= self.n):
            raise GraphError(f"unknown node {v}")

    def predecessors(self, v: int) -> frozenset[int]:
        self._check(v)
        return frozenset(self._pred[v])

    def successors(self, v: int) -> frozenset[int]:
        self._check(v)
        return frozenset(self._succ[v])

    def pred_list(self, v: int) -> tuple[int, ...]:
        return self._pred[v]

    def succ_list(self, v: int) -> tuple[int, ...]:
        return self._succ[v]

    def indegree(self, v: int) -> int:
        return len(self._pred[v])

    @property
    def max_indegree(self) -> int:
        return max((len(p) for p in self._pred[1:]), default=0)

    @cached_property
    def topological_order(self) -> tuple[int, ...]:
        """Kahn's algorithm, smallest id first. Raises on a cycle."""
        import heapq

        indeg = [len(p) for p in self._pred]
        heap = [v for v in self.nodes if indeg[v] == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            v = heapq.heappop(heap)
            order.append(v)
            for w in self._succ[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    heapq.heappush(heap, w)
        if len(order) != self.n:
            raise GraphError("graph contains a cycle")
        return tuple(order)

    def ancestors(self, targets: Iterable[int]) -> frozenset[int]:
        """All nodes with a path to some node of ``targets`` (targets included)."""
        seen = set(targets)
        todo = deque(seen)
        while todo:
            v = todo.popleft()
            for u in self._pred[v]:
                if u not in seen:
                    seen.add(u)
                    todo.append(u)
        return frozenset(seen)

    def with_targets(self, targets: Iterable[int]) -> "Dag":
        return Dag(self.n, self.edges, self.sources, frozenset(targets), self.max_indegree_2, dict(self.labels))


def predecessors(dag: Dag, v: int) -> frozenset[int]:
    return dag.predecessors(v)


def validate(dag: Dag) -> ValidationReport:
    out: list[Violation] = []
    for u, v in sorted(dag.edges):
        if u == v:
            out.append(Violation("self-loop", (u, v)))
    try:
        dag.topological_order
    except GraphError:
        out.append(Violation("acyclic", None))
    for s in sorted(dag.sources):
        if not 1 <= s <= dag.n:
            out.append(Violation("unknown-node", s))
        elif dag.indegree(s):
            out.append(Violation("source-indegree", s))
    for t in sorted(dag.targets):
        if not 1 <= t <= dag.n:
            out.append(Violation("unknown-node", t))
        elif dag.succ_list(t):
            out.append(Violation("target-outdegree", t))
    if not dag.targets:
        out.append(Violation("no-targets", None))
    if dag.max_indegree_2:
        for v in dag.nodes:
            if dag.indegree(v) > 2:
                out.append(Violation("max-indegree-2", v))
    return ValidationReport(tuple(out))


def to_dict(dag: Dag) -> dict:
    return {
        "version": FORMAT_VERSION,
        "n": dag.n,
        "edges": [list(e) for e in sorted(dag.edges)],
        "sources": sorted(dag.sources),
        "targets": sorted(dag.targets),
        "flags": {"max_indegree_2": dag.max_indegree_2},
        "labels": {str(k): v for k, v in sorted(dag.labels.items())},
    }


def from_dict(doc: dict) -> Dag:
    if not isinstance(doc, dict):
        raise GraphError("interchange document must be an object")
    if doc.get("version") != FORMAT_VERSION:
        raise GraphError(f"unsupported schema version {doc.get('version')!r}")
    try:
        n = int(doc["n"])
        raw_edges = [tuple(int(x) for x in e) for e in doc["edges"]]
        sources = [int(x) for x in doc["sources"]]
        targets = [int(x) for x in doc["targets"]]
        flags = doc.get("flags", {})
        labels = {int(k): str(v) for k, v in doc.get("labels", {}).items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphError(f"malformed graph document: {exc}") from exc
    if any(len(e) != 2 for e in raw_edges):
        raise GraphError("edges must be [u, v] pairs")
    if len(set(raw_edges)) != len(raw_edges):
        raise GraphError("duplicate edge in document")
    return Dag.build(
        n, raw_edges, sources, targets,
        max_indegree_2=bool(flags.get("max_indegree_2", False)),
        labels=labels,
    )


def to_dot(dag: Dag, name: str = "G") -> str:
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for v in dag.nodes:
        attrs = []
        if v in dag.labels:
            attrs.append(f'label="{v}\\n{dag.labels[v]}"')
        if v in dag.targets:
            attrs.append("shape=doublecircle")
        elif v in dag.sources:
            attrs.append("shape=box")
        lines.append(f"  v{v}" + (f" [{', '.join(attrs)}]" if attrs else "") + ";")
    for u, v in sorted(dag.edges):
        lines.append(f"  v{u} -> v{v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def serialize(dag: Dag, format: str = "interchange") -> str:
    if format in ("interchange", "json"):
        return json.dumps(to_dict(dag), indent=1)
    if format == "dot":
        return to_dot(dag)
    raise GraphError(f"unknown format {format!r}")


def deserialize(text: str) -> Dag:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"malformed graph text: {exc}") from exc
    return from_dict(doc)
