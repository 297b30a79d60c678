import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import gp_exprs
from gpolylab.constraints import c_enumerate, c_membership
from gpolylab.gpeval import eval_int
from gpolylab.gpexpr import GPExpr, parse
from gpolylab.gpstruct import (ApproxParams, ApproxViolation, NotGood, WeightVector,
                               approx_check, derivative, equivalent, good, good_set,
                               leading_sum, m_threshold, much_greater, nondegenerate,
                               pet_compare, pet_successor, proper_set, rescale,
                               shifted_system, weight_vector)
from gpolylab.scalar import ExactScalar

S2, S3, PI = ExactScalar.sqrt(2), ExactScalar.sqrt(3), ExactScalar.pi()

SYSTEM = [
    "3*n^2 - ni(sqrt(5)*n)",
    "ni(pi*n^3*ni(sqrt(2)*n)) + ni(1/5*n^3)",
    "n*ni(pi*n)",
    "ni(pi*n^3*ni(sqrt(2)*n)) + ni(pi*n^2)",
]


def check_identity(p, r, lo, hi):
    pm = eval_int(p, r.m)
    members = c_enumerate(r.C1, lo, hi)
    for n in members:
        assert eval_int(r.D, n) == eval_int(p, n + r.m) - eval_int(p, n) - pm, n
    return members


def test_leading_sums():
    e = parse("ni(sqrt(2)*n^2*ni(sqrt(3)*n) + ni(pi*n^3)) + 2*n^3 + 2*n^2")
    assert leading_sum(e) == ExactScalar.sqrt(6) + PI + 2
    assert leading_sum(parse("n + n*ni(2*pi*n - ni(2*pi*n))")).is_zero()
    assert leading_sum(parse("n^2")) == 1


def test_nondegenerate():
    assert nondegenerate([parse("n^2 + n"), parse("n^2 + ni(sqrt(3)*n)")])
    assert not nondegenerate([parse("n*ni(2*pi*n) + n"), parse("ni(2*pi*n^2) + 2*n")])
    assert not nondegenerate([parse("n"), parse("n")])


def test_equivalence_examples():
    assert equivalent(parse(SYSTEM[1]), parse(SYSTEM[3]))
    assert not equivalent(parse(SYSTEM[0]), parse(SYSTEM[2]))


def test_weight_vectors():
    assert weight_vector(parse(p) for p in SYSTEM).to_json() == [0, 2, 0, 1]
    assert weight_vector([parse("n"), parse("2*n"), parse("n^2")]).to_json() == [2, 1]
    assert weight_vector([]).to_json() == []


def test_pet_compare_examples():
    assert pet_compare((0, 2, 0, 1), (0, 2, 0, 1)) == "equal"
    assert pet_compare((5, 1), (0, 2)) == "less"
    assert pet_compare((0, 2, 0, 1), (9, 9, 9)) == "greater"
    assert WeightVector((1, 0, 0)) == WeightVector((1,))


vectors = st.lists(st.integers(0, 3), max_size=5)


@settings(max_examples=500, deadline=None)
@given(vectors, vectors, vectors)
def test_pet_order_is_strict_total(a, b, c):
    ab, ba = pet_compare(a, b), pet_compare(b, a)
    assert {ab, ba} in ({"equal"}, {"less", "greater"})
    assert (ab == "equal") == (WeightVector(tuple(a)) == WeightVector(tuple(b)))
    if ab == "less" and pet_compare(b, c) == "less":
        assert pet_compare(a, c) == "less"


def test_m_threshold_values():
    assert m_threshold(parse("ni(sqrt(2)*n^2)")) == 2
    assert m_threshold(parse("ni(pi*n^3)")) == 2
    want = 2 * (4 * S2 + 2 * S3) / 1
    r = m_threshold(parse("2*ni(sqrt(2)*n^2) - ni(sqrt(3)*n^2)"))
    assert (r.num * (4 * S2 - 2 * S3) - want * r.den).is_zero()


def test_approx_examples():
    assert approx_check(1000, 1001, ApproxParams(100))
    assert approx_check(7, 7, ApproxParams(10**6))
    assert not approx_check(1, 2, ApproxParams(1000))
    assert much_greater(10**4, 1, 1000) and not much_greater(10, 1, 1000)


def test_good_examples():
    half = parse("ni(1/2*n)")
    assert not good(1, half)
    assert good(2, half)
    assert all(good(m, parse("ni(sqrt(2)*n)")) for m in range(-50, 51) if m)
    assert c_enumerate(good_set(half, Fraction(1, 4)), -10, 10) == list(range(-10, 11, 2))
    members = c_enumerate(good_set(parse("ni(sqrt(2)*n)"), Fraction(1, 4)), -200, 200)
    assert all(good(m, parse("ni(sqrt(2)*n)")) for m in members)
    with pytest.raises(ValueError):
        good_set(half, Fraction(1, 3))


def test_not_good_shift_rejected():
    with pytest.raises(NotGood):
        derivative(parse("ni(1/2*n)"), 1)


def test_derivative_binomial():
    r = derivative(parse("n^2"), 3)
    assert r.D == parse("6*n") and len(r.C1) == 0


def test_derivative_degree_one_is_additive():
    p = parse("ni(sqrt(2)*n)")
    r = derivative(p, 7)
    assert r.D.is_zero()
    assert len(check_identity(p, r, -2000, 2000)) > 100


def test_derivative_quadratic_bracket():
    p = parse("ni(sqrt(2)*n^2)")
    r = derivative(p, 5)
    assert r.D == parse("ni(10*sqrt(2)*n)")
    assert len(check_identity(p, r, 1, 10**4)) > 100


@pytest.mark.parametrize("text, m", [("ni(pi*n^3)", 7), ("n^2", -4), ("ni(sqrt(2)*n^2*ni(sqrt(3)*n))", 401)])
def test_derivative_identity_and_law(text, m):
    p = parse(text)
    r = derivative(p, m)
    assert r.D.degree() < p.degree()
    check_identity(p, r, -3000, 3000)
    target = p.degree() * m * leading_sum(p)
    assert (2000 * abs(leading_sum(r.D) - target) - abs(target)).sign() < 0


def test_small_shift_violates_threshold():
    with pytest.raises(ApproxViolation):
        derivative(parse("2*ni(sqrt(2)*n^2) - ni(sqrt(3)*n^2)"), 3)


def test_derivative_lowers_weight():
    for text in ["ni(sqrt(2)*n^2)", "ni(pi*n^3)", "n^3 + ni(e*n^2)", "ni(sqrt(3)*n*ni(sqrt(2)*n))"]:
        p = parse(text)
        for m in (5, 11, -13):
            D = derivative(p, m, strict=False).D
            assert pet_compare(weight_vector([D]), weight_vector([p])) == "less"


def test_proper_set_examples():
    assert len(proper_set([parse("n^2")], [3, 5], Fraction(1, 8))) == 0
    p = parse("ni(sqrt(2)*n^2)")
    C = proper_set([p], [5, 7], Fraction(1, 8))
    members = c_enumerate(C, 1, 10**4)
    assert members
    for m in (5, 7):
        D = derivative(p, m).D
        pm = eval_int(p, m)
        assert all(eval_int(D, n) == eval_int(p, n + m) - eval_int(p, n) - pm for n in members)
    lin = proper_set([parse("ni(sqrt(2)*n)"), parse("n")], [3], Fraction(1, 8))
    f = parse("ni(sqrt(2)*n)")
    assert all(eval_int(f, n + 3) == eval_int(f, n) + eval_int(f, 3) for n in c_enumerate(lin, -500, 500))


def test_shifted_system_raw_example_is_degenerate():
    with pytest.raises(ApproxViolation):
        shifted_system([parse("n^2"), parse("2*n^2")], [10**4, 10**5])


def test_shifted_system_after_rescaling():
    P = rescale([parse("n^2"), parse("2*n^2")], 100)
    shifts = [10**4, 10**5]
    qs, C1 = shifted_system(P, shifts)
    assert len(qs) == 4
    members = c_enumerate(C1, 1, 1000)
    for idx, q in enumerate(qs):
        p, k = P[idx // 2], shifts[idx % 2]
        pk = eval_int(p, k)
        assert all(eval_int(q, n) == eval_int(p, n + k) - pk - eval_int(P[0], n) for n in members)


def test_shifted_system_rejects_zero_shift():
    with pytest.raises((ApproxViolation, NotGood, ValueError)):
        shifted_system([parse("n^2")], [0])


def test_shifted_system_with_brackets():
    P = rescale([parse("ni(sqrt(2)*n^2)"), parse("ni(sqrt(3)*n^2)")], 100)
    qs, C1 = shifted_system(P, [10**4, 3 * 10**4])
    members = c_enumerate(C1, -500, 500)
    assert members
    p1 = P[0]
    for idx, q in enumerate(qs):
        p, k = P[idx // 2], [10**4, 3 * 10**4][idx % 2]
        pk = eval_int(p, k)
        for n in members:
            assert eval_int(q, n) == eval_int(p, n + k) - pk - eval_int(p1, n)


ATOMS = ["sqrt(2)", "sqrt(3)", "pi", "e", "sqrt(5)", "1/3", "2"]


def random_poly(rng, max_deg=3):
    terms = []
    for _ in range(rng.randint(1, 3)):
        d = rng.randint(1, max_deg)
        a = rng.choice(ATOMS)
        if d >= 2 and rng.random() < 0.5:
            j = rng.randint(1, d - 1)
            terms.append(f"ni({a}*n^{d - j}*ni({rng.choice(ATOMS)}*n^{j}))")
        else:
            terms.append(f"ni({a}*n^{d})")
    return parse(" + ".join(terms))


def test_pet_successors_descend():
    rng = random.Random(11)
    checked = 0
    for _ in range(60):
        P = [random_poly(rng) for _ in range(rng.randint(2, 3))]
        shifts = [rng.choice([5, 7, 11, 13, 17])]
        try:
            succ = pet_successor(P, shifts)
        except (NotGood, ApproxViolation):
            continue
        assert pet_compare(weight_vector(succ), weight_vector(P)) == "less"
        checked += 1
    assert checked >= 40


@settings(max_examples=200, deadline=None)
@given(gp_exprs(), gp_exprs(), gp_exprs())
def test_equivalence_relation(p, q, r):
    assert equivalent(p, p)
    assert equivalent(p, q) == equivalent(q, p)
    if equivalent(p, q) and equivalent(q, r):
        assert equivalent(p, r)


@settings(max_examples=200, deadline=None)
@given(gp_exprs(), gp_exprs(), st.integers(1, 9))
def test_leading_sum_linearity(p, q, c):
    assert leading_sum(GPExpr.const(c) * p) == c * leading_sum(p)
    if p.degree() == q.degree() and (p + q).degree() == p.degree():
        assert leading_sum(p + q) == leading_sum(p) + leading_sum(q)
