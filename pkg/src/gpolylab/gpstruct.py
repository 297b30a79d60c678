"""Leading sums, equivalence classes, weight vectors and derivatives."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .constraints import ConstraintSet, c_intersect
from .gpeval import evaluate, nearest_int
from .gpexpr import Bracket, GPExpr, ZERO, as_expr, nearest, substitute_scale, to_text
from .scalar import ExactScalar, as_scalar, scalar_sum
from .sgp import UnsupportedPattern, to_sgp_normal

__all__ = [
    "N0",
    "ApproxParams",
    "ApproxViolation",
    "DegenerateError",
    "NotGood",
    "Ratio",
    "WeightVector",
    "DerivativeResult",
    "leading_sum",
    "nondegenerate",
    "equivalent",
    "weight_vector",
    "pet_compare",
    "m_threshold",
    "good",
    "good_set",
    "derivative",
    "proper_set",
    "shifted_system",
    "approx_check",
    "much_greater",
    "rescale",
    "pet_successor",
]

N0 = 1000
HALF = Fraction(1, 2)


class ApproxViolation(AssertionError):
    """A >>/approx assertion failed (usually: shifts or coefficients too small)."""


class DegenerateError(ValueError):
    pass


class NotGood(ValueError):
    """A bracket argument has fractional part exactly 1/2 at the shift."""


@dataclass(frozen=True)
class ApproxParams:
    N: int = N0

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be at least 1")


# ---------------------------------------------------------------------------
# leading sums and classes

def _term_degree(key) -> int:
    k, brs = key
    return k + sum(b.inner.degree() for b in brs)


def leading_sum(p) -> ExactScalar:
    """A(p), by the multilinear rule on the canonical form."""
    p = as_expr(p)
    d = p.degree()
    parts = []
    for key, c in p.terms:
        if _term_degree(key) != d:
            continue
        v = c
        for b in key[1]:
            v = v * leading_sum(b.inner)
        parts.append(v)
    return scalar_sum(parts)


def nondegenerate(P: Sequence) -> bool:
    P = [as_expr(p) for p in P]
    if any(leading_sum(p).is_zero() for p in P):
        return False
    return not any(leading_sum(p - q).is_zero() for p, q in combinations(P, 2))


def _top_part(p: GPExpr) -> GPExpr:
    d = p.degree()
    return GPExpr(t for t in p.terms if _term_degree(t[0]) == d)


def equivalent(p, q) -> bool:
    """deg p = deg q and deg(p - q) < deg p, with syntactic cancellation."""
    p, q = as_expr(p), as_expr(q)
    if p == q:
        return True
    d = p.degree()
    return d == q.degree() and (p - q).degree() < d


@dataclass(frozen=True)
class WeightVector:
    """Class counts per degree, index 0 holding degree 1."""

    counts: tuple = ()

    def __post_init__(self):
        c = [int(x) for x in self.counts]
        if any(x < 0 for x in c):
            raise ValueError("weights are non-negative")
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "counts", tuple(c))

    def __getitem__(self, degree: int) -> int:
        return self.counts[degree - 1] if 1 <= degree <= len(self.counts) else 0

    def __lt__(self, other):
        return pet_compare(self, other) == "less"

    def __gt__(self, other):
        return pet_compare(self, other) == "greater"

    def to_json(self) -> list:
        return list(self.counts)


def weight_vector(P: Iterable) -> WeightVector:
    classes: set = set()
    for p in P:
        p = as_expr(p)
        d = p.degree()
        if d == 0:
            continue  # constants and zero carry no weight
        classes.add((d, _top_part(p)))
    top = max((d for d, _ in classes), default=0)
    counts = [0] * top
    for d, _ in classes:
        counts[d - 1] += 1
    return WeightVector(tuple(counts))


def pet_compare(a, b) -> str:
    a = a if isinstance(a, WeightVector) else WeightVector(tuple(a))
    b = b if isinstance(b, WeightVector) else WeightVector(tuple(b))
    for d in range(max(len(a.counts), len(b.counts)), 0, -1):
        if a[d] != b[d]:
            return "greater" if a[d] > b[d] else "less"
    return "equal"


# ---------------------------------------------------------------------------
# approximation discipline

def much_greater(a, b, N: int = N0) -> bool:
    """a >>_N b: a > b > 0 and a > N b."""
    a, b = as_scalar(a), as_scalar(b)
    return b.sign() > 0 and (a - b).sign() > 0 and (a - N * b).sign() > 0


def approx_check(a, b, params: ApproxParams = ApproxParams()) -> bool:
    """|a| > N|a - b| and |b| > N|a - b|."""
    a, b = as_scalar(a), as_scalar(b)
    gap = params.N * abs(a - b)
    return (abs(a) - gap).sign() > 0 and (abs(b) - gap).sign() > 0


@dataclass(frozen=True)
class Ratio:
    """num / den with den > 0; kept unreduced since the ring lacks inverses."""

    num: ExactScalar
    den: ExactScalar

    def __float__(self):
        return float(self.num) / float(self.den)

    def _cmp(self, x) -> int:
        return (self.num - as_scalar(x) * self.den).sign()

    def __lt__(self, x):
        return self._cmp(x) < 0

    def __gt__(self, x):
        return self._cmp(x) > 0

    def __eq__(self, x):
        if isinstance(x, Ratio):
            return (self.num * x.den - x.num * self.den).is_zero()
        return self._cmp(x) == 0

    def __hash__(self):
        return hash(float(self))

    def exceeded_by(self, m: int) -> bool:
        return self._cmp(abs(m)) < 0

    def to_json(self) -> dict:
        return {"num": str(self.num), "den": str(self.den), "approx": float(self)}


def m_threshold(h) -> Ratio:
    """2 sum |c_k deg(p_k) A(p_k)| / |sum c_k deg(p_k) A(p_k)| over the normal form."""
    h = as_expr(h)
    if h.degree() < 2:
        raise ValueError("the threshold is defined for degree >= 2")
    form, _ = to_sgp_normal(h)
    parts = [ExactScalar(c) * q.degree() * leading_sum(q) for c, q in form.terms]
    parts += [c * k for (k, _), c in form.poly.terms]
    den = abs(scalar_sum(parts))
    if den.is_zero():
        raise DegenerateError(f"weighted leading sum of {to_text(h)} vanishes")
    return Ratio(2 * scalar_sum(abs(x) for x in parts), den)


# ---------------------------------------------------------------------------
# goodness and derivatives

def good(m: int, p) -> bool:
    for b in as_expr(p).brackets():
        v = evaluate(b.inner, m)
        if v.is_rational() and (v.rational() - HALF).denominator == 1:
            return False
    return True


def good_set(p, delta) -> ConstraintSet:
    delta = Fraction(delta)
    if not 0 < delta <= Fraction(1, 4):
        raise ValueError("delta must lie in (0, 1/4]")
    return ConstraintSet.build((b.inner, delta) for b in as_expr(p).brackets())


def _half_gap_window(phi: ExactScalar) -> Fraction:
    """A dyadic w with 0 < w <= (1/2 - |phi|) / 2."""
    a = abs(phi)
    if a.is_rational():
        gap = (HALF - a.rational()) / 2
    else:
        w = 64
        while True:
            _, hi = a.enclosure(w)
            gap = (HALF - Fraction(hi, 1 << w)) / 2
            if gap > 0:
                break
            w *= 2
    j = max(0, -math.floor(math.log2(gap)))
    while Fraction(1, 1 << j) > gap:
        j += 1
    return Fraction(1, 1 << j)


@dataclass(frozen=True)
class DerivativeResult:
    D: GPExpr
    C1: ConstraintSet
    m: int
    metadata: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        return {"D": to_text(self.D), "C1": self.C1.to_json(), "m": self.m,
                "metadata": self.metadata}


class _Shifter:
    """Expands f(n + m) into brackets of f plus new lower-degree brackets."""

    def __init__(self, m: int, cap: Fraction):
        self.m = m
        self.cap = cap
        self.conds: list = []
        self.cache: dict = {}
        self.windows: list = []

    def expand(self, f: GPExpr) -> GPExpr:
        shifted_n = GPExpr.const(self.m) + GPExpr([((1, ()), ExactScalar(1))])
        out = ZERO
        for (k, brs), c in f.terms:
            term = GPExpr.const(c) * shifted_n**k
            for b in brs:
                term = term * self.bracket(b)
            out = out + term
        return out

    def delta_of(self, g: GPExpr) -> GPExpr:
        e = self.expand(g)
        return e - g - GPExpr.const(e.constant_term())

    def bracket(self, b: Bracket) -> GPExpr:
        if b in self.cache:
            return self.cache[b]
        if b.kind != "ni":
            raise UnsupportedPattern("floor brackets are not supported by the derivative")
        g = b.inner
        gm = evaluate(g, self.m)
        bm = nearest_int(gm)
        phi = gm - bm
        if phi.is_rational() and phi.rational() == HALF:
            raise NotGood(f"{{{to_text(g)}}} = 1/2 at m = {self.m}")
        dg = self.delta_of(g)
        w = min(self.cap, _half_gap_window(phi))
        self.windows.append(str(w))
        self.conds.append((g, w))
        if not dg.is_integer_valued():
            self.conds.append((dg, w))
        out = GPExpr([((0, (b,)), ExactScalar(1))]) + GPExpr.const(bm) + nearest(dg)
        self.cache[b] = out
        return out


def derivative(p, m: int, params: ApproxParams = ApproxParams(), *,
               delta=None, strict: bool = True) -> DerivativeResult:
    """D with D(n) = p(n+m) - p(n) - p(m) on the returned C1.

    With ``strict`` the shift must exceed m_threshold(p) and the leading-sum
    law ``|A(D) - d m A(p)| 2N < |d m A(p)|`` is asserted.
    """
    p = as_expr(p)
    m = int(m)
    d = p.degree()
    if not good(m, p):
        raise NotGood(f"m = {m} is not good for {to_text(p)}")
    splits = sum(1 for _ in p.brackets())
    cap = Fraction(1, 8 * (1 + splits))
    if delta is not None:
        cap = min(cap, Fraction(delta))
    meta: dict = {"degree": d, "window_cap": str(cap), "splits": splits}
    if strict and d >= 2:
        thr = m_threshold(p)
        meta["m_threshold"] = thr.to_json()
        if not thr.exceeded_by(m):
            raise ApproxViolation(f"|m| = {abs(m)} does not exceed m(p) ~ {float(thr):.4g}")
    sh = _Shifter(m, cap)
    e = sh.expand(p)
    const = e.constant_term()
    pm = evaluate(p, m)
    if not (const - pm).is_zero():
        raise AssertionError("shift expansion lost its constant term")
    D = e - p - GPExpr.const(const)
    meta["windows"] = sh.windows
    if d >= 1 and D.degree() >= d and not D.is_zero():
        raise AssertionError("derivative did not lower the degree")
    if strict and d >= 2:
        target = d * m * leading_sum(p)
        if target.is_zero():
            raise DegenerateError("A(p) vanishes")
        err = abs(leading_sum(D) - target)
        if not (2 * params.N * err - abs(target)).sign() < 0:
            raise ApproxViolation(
                f"leading-sum law fails at m = {m}: |A(D) - {d}mA(p)| ~ {float(err):.4g}")
    return DerivativeResult(D, ConstraintSet.build(sh.conds), m, meta)


def proper_set(P: Iterable, M: Iterable[int], delta) -> ConstraintSet:
    out = ConstraintSet()
    for p in P:
        for m in M:
            out = c_intersect(out, derivative(p, m, delta=delta, strict=False).C1)
    return ConstraintSet.build(out.conditions)


def rescale(P: Iterable, q: int) -> list:
    """The system n -> p(q n); large q makes every leading sum large."""
    return [substitute_scale(as_expr(p), q) for p in P]


def shifted_system(P: Sequence, shifts: Sequence[int],
                   params: ApproxParams = ApproxParams()) -> tuple[list, ConstraintSet]:
    """q_{i,j} = D(p_i, k_j) + p_i - p_1, with the >> 1 separations asserted.

    Returns the family row by row (i outer, j inner) and the joint C1.
    """
    P = [as_expr(p) for p in P]
    if not P or not shifts:
        raise ValueError("need polynomials and shifts")
    if any(p.degree() < 2 for p in P):
        raise ValueError("every polynomial needs degree >= 2")
    if not nondegenerate(P):
        raise DegenerateError("the system is degenerate")
    p1 = P[0]
    C1 = ConstraintSet()
    labels, qs = [], []
    for i, p in enumerate(P, 1):
        for j, k in enumerate(shifts):
            r = derivative(p, k, params)
            C1 = c_intersect(C1, r.C1)
            labels.append((i, j))
            qs.append(r.D + p - p1)
    one = ExactScalar(1)
    for lab, q in zip(labels, qs):
        if not much_greater(abs(leading_sum(q)), one, params.N):
            raise ApproxViolation(f"|A(q_{lab})| >> 1 fails (A = {leading_sum(q)})")
    for (la, qa), (lb, qb) in combinations(zip(labels, qs), 2):
        a = abs(leading_sum(qa - qb))
        if not much_greater(a, one, params.N):
            raise ApproxViolation(f"|A(q_{la} - q_{lb})| >> 1 fails (|A| = {a})")
    return qs, ConstraintSet.build(C1.conditions)


def pet_successor(P: Sequence, shifts: Sequence[int]) -> list:
    """One PET step: subtract a minimal-degree element after shifting.

    Returns the nonzero q_{i,j} = D(p_i, k_j) + p_i - p_1 with p_1 of least
    degree.  The weight vector of the result precedes that of P.
    """
    P = sorted((as_expr(p) for p in P), key=lambda p: p.degree())
    if not P:
        return []
    p1 = P[0]
    out = []
    for p in P:
        for k in shifts:
            q = derivative(p, k, strict=False).D + p - p1
            if not q.is_zero() and q not in out:
                out.append(q)
    return out
