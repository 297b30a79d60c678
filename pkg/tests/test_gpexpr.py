import pytest
from hypothesis import given, settings

from conftest import gp_exprs
from gpolylab.gpeval import evaluate
from gpolylab.gpexpr import (FiniteIndexSet, GPExpr, GPSyntaxError, N, check_gp, degree,
                             monomial, nearest, parse, substitute_scale, to_text)
from gpolylab.scalar import ExactScalar

S2 = ExactScalar.sqrt(2)


def test_nested_sequence_parses():
    e = parse("ni(pi*n*ni(sqrt(5)*n^2 + 2*n))")
    inner = nearest(monomial(ExactScalar.sqrt(5), 2) + monomial(2, 1))
    assert e == nearest(monomial(ExactScalar.pi(), 1) * inner)
    assert to_text(e) == "ni(pi*n*ni(sqrt(5)*n^2 + 2*n))"


def test_sum_parses():
    assert parse("n^2 + n") == monomial(1, 2) + monomial(1, 1)


def test_unbalanced_offset():
    with pytest.raises(GPSyntaxError) as exc:
        parse("ni(n")
    assert exc.value.offset == 5


@pytest.mark.parametrize("text, offset", [("n +", 4), ("2*x", 3), ("n^-1", 3), ("sqrt(2", 7)])
def test_syntax_error_offsets(text, offset):
    with pytest.raises(GPSyntaxError) as exc:
        parse(text)
    assert exc.value.offset == offset


def test_printing():
    assert to_text(monomial(S2, 3)) == "sqrt(2)*n^3"
    assert to_text(nearest(monomial(ExactScalar(1) / 2, 1))) == "ni(1/2*n)"
    assert to_text(parse("3*n^2 - ni(sqrt(5)*n)")) == "3*n^2 - ni(sqrt(5)*n)"


@pytest.mark.parametrize("text, d", [
    ("ni(pi*n^3*ni(sqrt(2)*n)) + ni(1/5*n^3)", 4),
    ("3*n^2 - ni(sqrt(5)*n)", 2),
    ("n", 1),
    ("fl(sqrt(2)*n)*ni(pi*n^2)", 3),
])
def test_degrees(text, d):
    assert degree(parse(text)) == d


def test_integer_brackets_collapse():
    assert parse("ni(2*n^2 + n)") == parse("2*n^2 + n")
    assert parse("ni(sqrt(2)*n) - ni(sqrt(2)*n)").is_zero()


def test_constant_terms_rejected():
    with pytest.raises(ValueError):
        check_gp(parse("n + 1"))
    with pytest.raises(ValueError):
        check_gp(parse("ni(sqrt(2)*n + 1/3)"))


def test_scale_substitution():
    e = parse("ni(sqrt(2)*n^2) + n")
    assert substitute_scale(e, 3) == parse("ni(9*sqrt(2)*n^2) + 3*n")


def test_finite_index_sets():
    a = FiniteIndexSet([3, 1, 2, 2])
    assert tuple(a) == (1, 2, 3)
    assert a.precedes(FiniteIndexSet([4, 7]))
    assert not a.precedes(FiniteIndexSet([3]))
    assert a.disjoint(FiniteIndexSet([4]))
    with pytest.raises(ValueError):
        FiniteIndexSet([])
    with pytest.raises(ValueError):
        FiniteIndexSet([0, 1])


@settings(max_examples=1000, deadline=None)
@given(gp_exprs())
def test_print_parse_round_trip(e):
    assert parse(to_text(e)) == e
    assert GPExpr.from_json(e.to_json()) == e


@settings(max_examples=200, deadline=None)
@given(gp_exprs(), gp_exprs())
def test_degree_of_products_and_sums(a, b):
    if a.is_zero() or b.is_zero():
        return
    assert degree(a * b) == degree(a) + degree(b)
    assert degree(a + b) <= max(degree(a), degree(b))


@settings(max_examples=200, deadline=None)
@given(gp_exprs())
def test_vanishes_at_zero(e):
    assert evaluate(e, 0).is_zero()
