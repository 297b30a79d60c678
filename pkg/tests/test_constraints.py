import random
from fractions import Fraction

import pytest

from gpolylab.constraints import (BudgetExceeded, ConstraintSet, NotFound, c_enumerate,
                                  c_intersect, c_membership, frac_in_window,
                                  ip_intersection_witness)
from gpolylab.gpeval import evaluate, nearest_int
from gpolylab.gpexpr import parse
from gpolylab.scalar import ExactScalar

TENTH = Fraction(1, 10)
R2 = ConstraintSet(((parse("sqrt(2)*n"), TENTH),))


def brute(C, lo, hi):
    out = []
    for n in range(lo, hi + 1):
        ok = True
        for q, d in C.conditions:
            v = evaluate(q, n)
            f = v - nearest_int(v)
            ok &= (f + d).sign() > 0 and (d - f).sign() > 0
        if ok:
            out.append(n)
    return out


def test_window_bounds():
    with pytest.raises(ValueError):
        ConstraintSet(((parse("n"), Fraction(1, 2)),))
    with pytest.raises(ValueError):
        ConstraintSet(((parse("n"), 0),))


def test_build_drops_vacuous():
    C = ConstraintSet.build([(parse("sqrt(2)*n"), Fraction(3, 4)), (parse("2*n"), TENTH),
                             (parse("sqrt(3)*n"), Fraction(1, 3)), (parse("sqrt(3)*n"), TENTH)])
    assert C.conditions == ((parse("sqrt(3)*n"), TENTH),)


def test_membership_examples():
    assert c_membership(0, R2)
    assert c_membership(29, R2)
    assert not c_membership(1, R2)
    assert 29 in R2


def test_open_window_edge():
    C = ConstraintSet(((parse("1/4*n"), Fraction(1, 4)),))
    assert not c_membership(1, C)
    assert c_membership(4, C)


def test_enumerate_examples():
    got = c_enumerate(R2, 1, 30)
    assert {5, 12, 17, 29} <= set(got) and not {1, 7} & set(got)
    assert got == [5, 12, 17, 24, 29] == brute(R2, 1, 30)
    assert c_enumerate(ConstraintSet(), 1, 5) == [1, 2, 3, 4, 5]
    half = ConstraintSet(((parse("1/2*n"), Fraction(1, 4)),))
    assert c_enumerate(half, 1, 10) == [2, 4, 6, 8, 10]


def test_enumerate_budget():
    with pytest.raises(BudgetExceeded):
        c_enumerate(R2, 0, 10**6, budget=1000)


@pytest.mark.parametrize("text", ["sqrt(2)*n", "pi*n^2", "sqrt(3)*n*ni(sqrt(2)*n)", "e*n^3 + 1/3*n"])
def test_enumerate_matches_brute_force(text):
    C = ConstraintSet(((parse(text), Fraction(1, 7)),))
    assert c_enumerate(C, -400, 400) == brute(C, -400, 400)


def test_enumerate_parallel_matches_serial():
    C = ConstraintSet(((parse("sqrt(2)*n^2"), TENTH), (parse("pi*n"), Fraction(1, 3))))
    assert c_enumerate(C, -5000, 5000, jobs=3) == c_enumerate(C, -5000, 5000)


def test_symmetry_of_linear_condition():
    for text in ("sqrt(2)*n", "pi*n", "sqrt(3)*n"):
        C = ConstraintSet(((parse(text), Fraction(1, 20)),))
        members = set(c_enumerate(C, -2000, 2000))
        assert members == {-n for n in members}


def test_zero_is_always_member():
    rng = random.Random(3)
    for _ in range(20):
        assert c_membership(0, random_set(rng))


def test_intersect():
    a = R2
    b = ConstraintSet(((parse("pi*n^2"), Fraction(1, 4)),))
    assert c_intersect(ConstraintSet(), b) == b
    assert c_intersect(a, a) == a
    ab = c_intersect(a, b)
    for n in range(-100, 101):
        assert c_membership(n, ab) == (c_membership(n, a) and c_membership(n, b))
    assert set(c_enumerate(ab, -3000, 3000)) == set(c_enumerate(a, -3000, 3000)) & set(c_enumerate(b, -3000, 3000))


def test_json_round_trip():
    C = ConstraintSet(((parse("sqrt(2)*n^2"), TENTH), (parse("ni(pi*n)*e"), Fraction(1, 3))))
    assert ConstraintSet.from_json(C.to_json()) == C


def test_frac_in_window_rational_and_irrational():
    assert frac_in_window(ExactScalar(Fraction(21, 10)), Fraction(1, 5))
    assert not frac_in_window(ExactScalar(Fraction(5, 2)), Fraction(1, 5))
    assert frac_in_window(ExactScalar.sqrt(2) * 29, TENTH)


def test_witness_examples():
    alpha = ip_intersection_witness(R2, [1] * 200)
    assert sum(1 for _ in alpha) == 5
    assert tuple(ip_intersection_witness(ConstraintSet(), [7, 8])) == (1,)
    half = ConstraintSet(((parse("1/2*n"), Fraction(1, 4)),))
    with pytest.raises(NotFound):
        ip_intersection_witness(half, [1])


ATOMS = ["sqrt(2)", "sqrt(3)", "pi", "e", "sqrt(5)", "1/3*sqrt(7)"]


def random_set(rng):
    conds = []
    for _ in range(rng.randint(1, 2)):
        a = rng.choice(ATOMS)
        j = rng.randint(1, 2)
        text = rng.choice([f"{a}*n^{j}", f"{a}*n*ni({rng.choice(ATOMS)}*n)"]) if j == 1 else f"{a}*n^2"
        conds.append((parse(text), Fraction(1, rng.choice([4, 6, 8, 10]))))
    return ConstraintSet(tuple(conds))


FAMILIES = {
    "ones": [1] * 200,
    "naturals": list(range(1, 60)),
    "evens": list(range(2, 120, 2)),
    "squares": [i * i for i in range(1, 60)],
    "threes": [3] * 200,
}


@pytest.mark.parametrize("family", sorted(FAMILIES))
def test_random_sets_meet_finite_sums(family):
    rng = random.Random(2024)
    gens = FAMILIES[family]
    for _ in range(20):
        C = random_set(rng)
        alpha = ip_intersection_witness(C, gens, budget=1 << 16)
        assert c_membership(sum(gens[i - 1] for i in alpha), C)
