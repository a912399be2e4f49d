import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pebblekit.qbf import (
    EXISTS, FORALL, QbfFormula, QbfLimitExceeded, QbfSyntaxError, check_policy,
    duplicate_formula, evaluate_qbf, gap_parameters, parse_qbf,
)

FIG5 = """c five-variable example
p cnf 5 4
e 1 0
a 2 0
e 3 0
a 4 0
e 5 0
-1 -2 3 0
2 -3 -4 0
1 4 5 0
3 -4 -5 0
"""


def table_truth(f: QbfFormula) -> bool:
    """Fold the full truth table from the innermost quantifier outwards."""
    order = [v for _, v in f.prefix]
    table = {}
    for bits in itertools.product((False, True), repeat=len(order)):
        asg = dict(zip(order, bits))
        table[bits] = all(any(asg[v] == pol for v, pol in cl) for cl in f.clauses)
    for q, _ in reversed(f.prefix):
        fold = any if q == EXISTS else all
        table = {k: fold(table[k + (b,)] for b in (False, True)) for k in {k[:-1] for k in table}}
    return table[()]


def test_trivial_exists():
    f = parse_qbf("p cnf 1 1\ne 1 0\n1 1 1 0\n")
    assert (f.u, f.c) == (1, 1)
    pol = evaluate_qbf(f)
    assert pol.truth and pol.root.value is True


def test_trivial_forall_false():
    f = parse_qbf("p cnf 1 1\na 1 0\n1 1 1 0\n")
    pol = evaluate_qbf(f)
    assert not pol.truth
    asg, j = check_policy(f, pol)
    assert asg == {1: False} and j == 0


def test_fig5_formula():
    f = parse_qbf(FIG5)
    assert (f.u, f.c) == (5, 4)
    assert [q for q, _ in f.prefix] == [EXISTS, FORALL, EXISTS, FORALL, EXISTS]
    pol = evaluate_qbf(f)
    assert pol.truth == table_truth(f)
    assert pol.truth is True
    assert check_policy(f, pol) is None


@pytest.mark.parametrize("text,word", [
    ("p cnf 2 1\ne 1 2 0\n1 2 0\n", "arity"),
    ("p cnf 2 1\ne 1 0\n1 2 2 0\n", "free variable"),
    ("e 1 0\n1 1 1 0\n", "header"),
    ("p cnf 1 1\ne 1 0\n1 x 1 0\n", "integer"),
    ("p cnf 1 1\ne 1 0\n1 1 1\n", "terminating"),
    ("p cnf 1 2\ne 1 0\n1 1 1 0\n", "announces"),
    ("p cnf 1 1\ne 1 0\n1 1 1 0\na 1 0\n", "after clauses"),
    ("p cnf 2 1\ne 1 0\ne 1 0\n1 1 1 0\n", "twice"),
])
def test_parse_errors(text, word):
    with pytest.raises(QbfSyntaxError, match=word):
        parse_qbf(text)


def test_parse_error_location():
    with pytest.raises(QbfSyntaxError) as exc:
        parse_qbf("p cnf 2 1\ne 1 0\n  1 2 0\n")
    assert exc.value.line == 3 and exc.value.column == 3


def test_qdimacs_round_trip():
    f = parse_qbf(FIG5)
    assert parse_qbf(f.to_qdimacs()) == f


def test_variable_limit():
    f = parse_qbf(FIG5)
    with pytest.raises(QbfLimitExceeded):
        evaluate_qbf(f, limit=4)


def test_double_false_policy():
    f = parse_qbf("p cnf 2 1\na 1 0\ne 2 0\n2 2 2 0\n")
    plain = evaluate_qbf(f)
    assert set(plain.root.children) == {False, True}
    short = evaluate_qbf(f, allow_double_false=True)
    assert short.root.double_false
    assert check_policy(f, short) is None
    g = parse_qbf("p cnf 2 2\na 1 0\ne 2 0\n1 2 2 0\n-1 -2 -2 0\n")
    assert not evaluate_qbf(g, allow_double_false=True).root.double_false


def test_gap_parameters():
    p = gap_parameters(1 / 6, 3, 3)
    assert p.a == pytest.approx(1) and p.K == 3
    p = gap_parameters(1 / 3, 3, 3)
    assert p.a == 0 and p.K == 2 and p.duplication is None
    p = gap_parameters(1 / 9, 2, 2)
    assert p.a == pytest.approx(2) and p.K == 4
    assert gap_parameters(0.1666, 3, 3).a == pytest.approx(1, abs=1e-2)
    for bad in (0, -0.1, 0.5):
        with pytest.raises(ValueError):
            gap_parameters(bad, 3, 3)


def test_schedule():
    p = gap_parameters(1 / 3, 2, 1)
    assert p.schedule[:2] == [21, 15]
    assert p.schedule[-1] == 4 * p.K + 1


def test_duplicate_formula():
    f = parse_qbf(FIG5)
    d = duplicate_formula(f, 2)
    assert d.c == 8 and d.u == 10
    assert evaluate_qbf(d).truth == evaluate_qbf(f).truth


lits = st.tuples(st.integers(1, 4), st.booleans())


@settings(max_examples=150, deadline=None)
@given(
    st.lists(st.sampled_from([EXISTS, FORALL]), min_size=1, max_size=4),
    st.lists(st.tuples(lits, lits, lits), min_size=1, max_size=5),
    st.booleans(),
)
def test_policy_certifies_truth(qs, clauses, dfalse):
    u = len(qs)
    clauses = [tuple((1 + (v - 1) % u, p) for v, p in cl) for cl in clauses]
    f = QbfFormula(tuple(zip(qs, range(1, u + 1))), tuple(clauses))
    pol = evaluate_qbf(f, allow_double_false=dfalse)
    assert pol.truth == table_truth(f)
    if pol.truth:
        assert check_policy(f, pol) is None
        leaves = list(pol.leaves())
        for asg in leaves:
            assert set(asg) == set(range(1, u + 1))
    else:
        asg, j = check_policy(f, pol)
        assert not any(asg.get(v) == p for v, p in f.clauses[j])
