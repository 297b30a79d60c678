from fractions import Fraction

from hypothesis import strategies as st

from gpolylab.gpexpr import GPExpr, N, monomial, nearest
from gpolylab.scalar import ExactScalar

small_fracs = st.fractions(min_value=-5, max_value=5, max_denominator=12)

atoms = st.sampled_from(
    [ExactScalar.sqrt(k) for k in (2, 3, 5, 6, 7)] + [ExactScalar.pi(), ExactScalar.e()]
)


@st.composite
def scalars(draw, max_terms=3):
    """Small combinations over the constant universe."""
    out = ExactScalar(draw(small_fracs))
    for _ in range(draw(st.integers(0, max_terms))):
        c = draw(small_fracs)
        a = draw(atoms)
        if draw(st.booleans()):
            a = a * draw(atoms)
        out = out + a * c
    return out


irrational_coeffs = st.sampled_from(
    [ExactScalar.sqrt(2), ExactScalar.sqrt(3), ExactScalar.sqrt(5) / 3,
     ExactScalar.pi(), ExactScalar.e() / 2, ExactScalar.sqrt(2) * 7 / 5]
)


@st.composite
def simple_terms(draw, max_depth=2):
    """a n^j, possibly times a bracket of a smaller simple term."""
    a = draw(irrational_coeffs)
    j = draw(st.integers(1, 2))
    t = monomial(a, j)
    if max_depth > 0 and draw(st.booleans()):
        t = t * nearest(draw(simple_terms(max_depth=max_depth - 1)))
    return t


@st.composite
def gp_exprs(draw, max_terms=3):
    """Integer combinations of brackets of simple terms plus integer polynomials."""
    out = GPExpr()
    for _ in range(draw(st.integers(1, max_terms))):
        c = draw(st.integers(-3, 3).filter(bool))
        if draw(st.integers(0, 3)) == 0:
            out = out + monomial(c, draw(st.integers(1, 3)))
        else:
            out = out + GPExpr.const(c) * nearest(draw(simple_terms()))
    return out


# acceptance reporting: one PASS/FAIL line per numbered criterion

import pytest

_CRITERIA: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or rep.outcome != "passed":
        k = mark.args[0]
        _CRITERIA[k] = _CRITERIA.get(k, True) and rep.outcome == "passed"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        terminalreporter.write_line(f"criterion {k}: {'PASS' if _CRITERIA[k] else 'FAIL'}")
