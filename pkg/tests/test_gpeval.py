from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import gp_exprs, scalars
from gpolylab.gpeval import (NonIntegerValue, RangeError, bracket_sum_check, eval_int,
                             eval_trace, evaluate, floor_int, frac, nearest_int)
from gpolylab.gpexpr import parse
from gpolylab.scalar import ExactScalar

S2, PI = ExactScalar.sqrt(2), ExactScalar.pi()


@pytest.mark.parametrize("a, want", [
    (Fraction(7, 2), 3), (Fraction(-1, 2), -1), (S2, 1), (Fraction(5, 2), 2), (-S2, -1),
])
def test_nearest(a, want):
    assert nearest_int(a) == want


def test_ties_give_plus_half():
    assert frac(Fraction(7, 2)).value == Fraction(1, 2)
    assert frac(Fraction(-1, 2)).value == Fraction(1, 2)


@pytest.mark.parametrize("a, want", [(Fraction(5, 2), 2), (Fraction(-1, 2), -1), (PI, 3), (-PI, -4)])
def test_floor(a, want):
    assert floor_int(a) == want


def test_frac_values():
    assert frac(Fraction(5, 2), "floor").value == Fraction(1, 2)
    f = frac(S2 * 5)
    assert f.value == S2 * 5 - 7 and f.bracket == 7


def test_eval_int_values():
    assert eval_int(parse("ni(sqrt(2)*n)"), 29) == 41
    assert eval_int(parse("ni(sqrt(2)*n)"), 0) == 0
    assert eval_int(parse("ni(pi*n*ni(sqrt(5)*n^2 + 2*n))"), 1) == 13


def test_eval_against_mpmath():
    e = parse("ni(pi*n*ni(sqrt(5)*n^2 + 2*n))")
    with mpmath.workprec(300):
        for n in (123, -77, 4001):
            inner = mpmath.sqrt(5) * n * n + 2 * n
            want = int(mpmath.ceil(mpmath.pi * n * int(mpmath.ceil(inner - 0.5)) - mpmath.mpf(1) / 2))
            assert eval_int(e, n) == want


def test_non_integer_and_range_errors():
    with pytest.raises(NonIntegerValue):
        eval_int(parse("sqrt(2)*n"), 3)
    with pytest.raises(RangeError):
        evaluate(parse("n"), 2**63)


def test_trace_lists_brackets():
    v, trace = eval_trace(parse("ni(pi*n*ni(sqrt(5)*n^2 + 2*n))"), 1)
    assert v == 13
    assert [t["value"] for t in trace] == [4, 13]


def test_bracket_sum_examples():
    cn, idn, _, _ = bracket_sum_check([Fraction(1, 5), Fraction(1, 5)])
    assert cn and idn
    cn, idn, _, _ = bracket_sum_check([Fraction(3, 10), Fraction(3, 10)])
    assert not cn and not idn
    _, _, cf, idf = bracket_sum_check([Fraction(3, 5), Fraction(7, 10)])
    assert not cf and not idf


@settings(max_examples=300, deadline=None)
@given(scalars())
def test_decompositions(a):
    fn = a - nearest_int(a)
    assert (fn + Fraction(1, 2)).sign() > 0 and (Fraction(1, 2) - fn).sign() >= 0
    ff = a - floor_int(a)
    assert ff.sign() >= 0 and (1 - ff).sign() > 0


@settings(max_examples=100, deadline=None)
@given(scalars(), st.sampled_from([64, 512, 2048]))
def test_precision_cap_does_not_change_answers(monkeypatch_free_a, cap):
    import os
    old = os.environ.get("GPOLYLAB_PRECISION_CAP")
    base = nearest_int(monkeypatch_free_a), floor_int(monkeypatch_free_a)
    os.environ["GPOLYLAB_PRECISION_CAP"] = str(max(cap, 4096))
    try:
        assert (nearest_int(monkeypatch_free_a), floor_int(monkeypatch_free_a)) == base
    finally:
        if old is None:
            os.environ.pop("GPOLYLAB_PRECISION_CAP", None)
        else:
            os.environ["GPOLYLAB_PRECISION_CAP"] = old


@settings(max_examples=100, deadline=None)
@given(gp_exprs(), gp_exprs(), st.integers(-500, 500))
def test_integer_valued_sums_add(a, b, n):
    assert eval_int(a + b, n) == eval_int(a, n) + eval_int(b, n)
