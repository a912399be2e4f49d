"""Quantified 3-CNF formulas: QDIMACS-subset parsing, brute-force evaluation,
and the K / epsilon parameter arithmetic of the pebbling reduction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

EXISTS = "exists"
FORALL = "forall"
DEFAULT_VARIABLE_LIMIT = 20
_LETTER = {EXISTS: "e", FORALL: "a"}

Literal = tuple[int, bool]
Clause = tuple[Literal, Literal, Literal]


class QbfSyntaxError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class QbfLimitExceeded(ValueError):
    pass


@dataclass(frozen=True)
class QbfFormula:
    prefix: tuple[tuple[str, int], ...]
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        seen = set()
        for q, v in self.prefix:
            if q not in (EXISTS, FORALL):
                raise ValueError(f"unknown quantifier {q!r}")
            if v in seen:
                raise ValueError(f"variable {v} quantified twice")
            seen.add(v)
        if not self.prefix:
            raise ValueError("formula needs at least one variable")
        if not self.clauses:
            raise ValueError("formula needs at least one clause")
        for j, cl in enumerate(self.clauses):
            if len(cl) != 3:
                raise ValueError(f"clause {j + 1} has {len(cl)} literals, expected 3")
            for v, _ in cl:
                if v not in seen:
                    raise ValueError(f"clause {j + 1} uses free variable {v}")

    @property
    def u(self) -> int:
        return len(self.prefix)

    @property
    def c(self) -> int:
        return len(self.clauses)

    @property
    def variables(self) -> list[int]:
        return [v for _, v in self.prefix]

    def quantifier(self, var: int) -> str:
        return dict((v, q) for q, v in self.prefix)[var]

    def to_qdimacs(self) -> str:
        top = max(self.variables)
        lines = [f"p cnf {top} {self.c}"]
        run: list[int] = []
        kind = None
        for q, v in self.prefix:
            if q != kind and run:
                lines.append(f"{_LETTER[kind]} {' '.join(map(str, run))} 0")
                run = []
            kind = q
            run.append(v)
        lines.append(f"{_LETTER[kind]} {' '.join(map(str, run))} 0")
        for cl in self.clauses:
            lines.append(" ".join(str(v if pol else -v) for v, pol in cl) + " 0")
        return "\n".join(lines) + "\n"


def parse_qbf(text: str) -> QbfFormula:
    """Parse ``p cnf u c``, then ``e``/``a`` lines, then 3-literal clause lines."""
    header = None
    prefix: list[tuple[str, int]] = []
    clauses: list[Clause] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        toks = line.split()
        col = raw.index(toks[0]) + 1
        if toks[0] == "p":
            if header is not None:
                raise QbfSyntaxError("duplicate header", lineno, col)
            if len(toks) != 4 or toks[1] != "cnf":
                raise QbfSyntaxError("header must read 'p cnf <u> <c>'", lineno, col)
            try:
                header = (int(toks[2]), int(toks[3]))
            except ValueError:
                raise QbfSyntaxError("header counts must be integers", lineno, col) from None
            continue
        if header is None:
            raise QbfSyntaxError("missing 'p cnf' header", lineno, col)
        nums = _ints(raw, toks[1:] if toks[0] in ("e", "a") else toks, lineno)
        if not nums or nums[-1] != 0 or 0 in nums[:-1]:
            raise QbfSyntaxError("line must end with a single terminating 0", lineno, col)
        body = nums[:-1]
        if toks[0] in ("e", "a"):
            if clauses:
                raise QbfSyntaxError("quantifier line after clauses", lineno, col)
            q = EXISTS if toks[0] == "e" else FORALL
            for v in body:
                if not 1 <= v <= header[0]:
                    raise QbfSyntaxError(f"variable {v} outside 1..{header[0]}", lineno, col)
                if any(v == w for _, w in prefix):
                    raise QbfSyntaxError(f"variable {v} quantified twice", lineno, col)
                prefix.append((q, v))
            continue
        if len(body) != 3:
            raise QbfSyntaxError(f"clause arity {len(body)}, expected exactly 3 literals", lineno, col)
        bound = {v for _, v in prefix}
        for lit in body:
            if abs(lit) not in bound:
                raise QbfSyntaxError(f"free variable {abs(lit)} in clause", lineno, col)
        clauses.append(tuple((abs(x), x > 0) for x in body))
    if header is None:
        raise QbfSyntaxError("missing 'p cnf' header")
    if len(clauses) != header[1]:
        raise QbfSyntaxError(f"header announces {header[1]} clauses, found {len(clauses)}")
    try:
        return QbfFormula(tuple(prefix), tuple(clauses))
    except ValueError as exc:
        raise QbfSyntaxError(str(exc)) from None


def _ints(raw: str, toks: list[str], lineno: int) -> list[int]:
    out = []
    for t in toks:
        try:
            out.append(int(t))
        except ValueError:
            raise QbfSyntaxError(f"expected an integer, got {t!r}", lineno, raw.index(t) + 1) from None
    return out


# -- evaluation ---------------------------------------------------------------

@dataclass
class PolicyNode:
    """One prefix variable. ``value`` is the existential choice, or ``None``
    at a universal node that took the double-false shortcut."""

    var: int
    quantifier: str
    value: bool | None = None
    children: dict = field(default_factory=dict)

    @property
    def double_false(self) -> bool:
        return self.quantifier == FORALL and None in self.children


@dataclass
class Policy:
    truth: bool
    root: PolicyNode | None = None
    counterexample: tuple[dict, int] | None = None

    def leaves(self):
        """Yield every root-to-leaf assignment; ``None`` marks a double-false variable."""
        def walk(node, acc):
            if node is None:
                yield dict(acc)
                return
            for val, child in node.children.items():
                acc[node.var] = val
                yield from walk(child, acc)
                del acc[node.var]
        if self.root is not None:
            yield from walk(self.root, {})


def literal_true(lit: Literal, assignment: dict) -> bool:
    val = assignment.get(lit[0])
    return val is not None and val == lit[1]


def falsified(f: QbfFormula, assignment: dict) -> int | None:
    """Index of the first clause with no true literal, or None."""
    for j, cl in enumerate(f.clauses):
        if not any(literal_true(l, assignment) for l in cl):
            return j
    return None


def evaluate_qbf(
    f: QbfFormula,
    *,
    allow_double_false: bool = False,
    limit: int = DEFAULT_VARIABLE_LIMIT,
) -> Policy:
    """Exact recursive evaluation.

    With ``allow_double_false`` a universal variable may be left unset (both
    literals false) when the rest of the formula holds that way; that branch
    then covers both values.
    """
    if f.u > limit:
        raise QbfLimitExceeded(f"{f.u} variables exceed the evaluation limit of {limit}")
    prefix = f.prefix

    def go(i: int, asg: dict):
        if i == len(prefix):
            return (True, None) if falsified(f, asg) is None else (False, None)
        q, v = prefix[i]
        if q == EXISTS:
            for val in (True, False):
                asg[v] = val
                ok, sub = go(i + 1, asg)
                del asg[v]
                if ok:
                    return True, PolicyNode(v, q, val, {val: sub})
            return False, None
        if allow_double_false:
            asg[v] = None
            ok, sub = go(i + 1, asg)
            del asg[v]
            if ok:
                return True, PolicyNode(v, q, None, {None: sub})
        kids = {}
        for val in (False, True):
            asg[v] = val
            ok, sub = go(i + 1, asg)
            del asg[v]
            if not ok:
                return False, None
            kids[val] = sub
        return True, PolicyNode(v, q, None, kids)

    ok, root = go(0, {})
    if ok:
        return Policy(True, root)
    return Policy(False, None, _refutation(f))


def _refutation(f: QbfFormula) -> tuple[dict, int]:
    """A falsifying play: universal moves chosen to win, existentials tried True first."""
    prefix = f.prefix

    def wins(i, asg):
        if i == len(prefix):
            return falsified(f, asg) is None
        q, v = prefix[i]
        res = []
        for val in (True, False):
            asg[v] = val
            res.append(wins(i + 1, asg))
            del asg[v]
        return any(res) if q == EXISTS else all(res)

    asg: dict = {}
    for i, (q, v) in enumerate(prefix):
        if q == FORALL:
            asg[v] = False
            if wins(i + 1, asg):
                asg[v] = True
        else:
            asg[v] = True
    return asg, falsified(f, asg)


def check_policy(f: QbfFormula, policy: Policy) -> tuple[dict, int] | None:
    """First (assignment, clause index) a policy leaf falsifies, or None."""
    if not policy.truth:
        return policy.counterexample
    for asg in policy.leaves():
        j = falsified(f, asg)
        if j is not None:
            return asg, j
    return None


def format_clause(f: QbfFormula, j: int) -> str:
    return "(" + " or ".join(("" if p else "not ") + f"x{v}" for v, p in f.clauses[j]) + ")"


# -- parameters ---------------------------------------------------------------

def duplicate_formula(f: QbfFormula, d: int) -> QbfFormula:
    """Repeat the clause list d times and add (d-1)*u unused existential variables."""
    if d < 1:
        raise ValueError("duplication factor must be >= 1")
    top = max(f.variables)
    extra = tuple((EXISTS, top + i) for i in range(1, (d - 1) * f.u + 1))
    return QbfFormula(f.prefix + extra, f.clauses * d)


@dataclass(frozen=True)
class ReductionParams:
    K: int
    u: int
    epsilon: float | None = None
    a: float | None = None
    duplication: int | None = None

    def __post_init__(self):
        if self.K < 2:
            raise ValueError("K must be at least 2")
        if self.u < 1:
            raise ValueError("u must be at least 1")

    @property
    def s(self) -> int:
        return 3 * self.K * self.u + 4 * self.K + 1

    @property
    def schedule(self) -> list[int]:
        """s_1 .. s_{u+1}; the last entry is the clause-region budget 4K + 1."""
        return [self.s - 3 * self.K * i for i in range(self.u + 1)]

    def to_dict(self) -> dict:
        return {"K": self.K, "u": self.u, "epsilon": self.epsilon, "a": self.a,
                "duplication": self.duplication, "s": self.s, "schedule": self.schedule}


def gap_parameters(epsilon: float, u: int, c: int) -> ReductionParams:
    """K = ceil(max(u, c)^a) with a = 1/(3 eps) - 1, clamped to K >= 2.

    ``duplication`` is the factor by which max(u, c) must grow so that
    max(u, c)^a >= 2 (None when a = 0, where any K works).
    """
    if not 0 < epsilon <= Fraction(1, 3):
        raise ValueError("epsilon must lie in (0, 1/3]")
    eps = Fraction(epsilon).limit_denominator(10_000)
    a = 1 / (3 * eps) - 1
    m = max(u, c)
    if a == 0:
        return ReductionParams(2, u, float(epsilon), 0.0, None)
    raw = m ** float(a)
    K = max(2, math.ceil(raw - 1e-9))
    need = 2 ** (1 / float(a))
    dup = max(1, math.ceil(need / m - 1e-9))
    return ReductionParams(K, u, float(epsilon), float(a), dup)
