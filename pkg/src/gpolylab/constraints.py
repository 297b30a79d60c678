"""Sets C(delta, Q) of integers where listed expressions are near integers.

A ``ConstraintSet`` is the intersection over its conditions ``(q, delta)`` of
``{n : {q(n)} in (-delta, delta)}`` with ``{.}`` the nearest-integer
fractional part.  The empty list means all integers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from . import _kernels
from .gpeval import evaluate, nearest_int
from .gpexpr import FiniteIndexSet, GPExpr, as_expr, parse, to_text
from .scalar import ExactScalar, as_scalar

__all__ = [
    "ConstraintSet",
    "NotFound",
    "BudgetExceeded",
    "frac_in_window",
    "c_membership",
    "c_enumerate",
    "c_intersect",
    "ip_intersection_witness",
]

HALF = Fraction(1, 2)
DEFAULT_ENUM_BUDGET = 10**7


class NotFound(Exception):
    """A bounded search finished without a witness."""


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class ConstraintSet:
    conditions: tuple = ()

    def __post_init__(self):
        conds = []
        for q, delta in self.conditions:
            q = as_expr(q)
            delta = Fraction(delta)
            if not 0 < delta < HALF:
                raise ValueError(f"window {delta} must lie in (0, 1/2)")
            conds.append((q, delta))
        object.__setattr__(self, "conditions", tuple(conds))

    @classmethod
    def build(cls, items: Iterable) -> "ConstraintSet":
        """Like the constructor, but windows of width >= 1/2 are dropped.

        ``{x}`` always lies in (-1/2, 1/2], so a window wider than 1/2 is
        vacuous.  Duplicate conditions keep the narrowest window.
        """
        best: dict = {}
        for q, delta in items:
            q = as_expr(q)
            delta = Fraction(delta)
            if delta <= 0:
                raise ValueError("window must be positive")
            if delta > HALF or q.is_zero() or q.is_integer_valued():
                continue
            if delta == HALF:
                delta = HALF - Fraction(1, 1 << 30)
            if q not in best or delta < best[q]:
                best[q] = delta
        return cls(tuple(best.items()))

    def __len__(self):
        return len(self.conditions)

    def __contains__(self, n: int) -> bool:
        return c_membership(n, self)

    def to_json(self) -> list:
        return [{"expr": to_text(q), "delta": str(d)} for q, d in self.conditions]

    @classmethod
    def from_json(cls, data: list) -> "ConstraintSet":
        return cls(tuple((parse(item["expr"]), Fraction(item["delta"])) for item in data))

    def __str__(self):
        if not self.conditions:
            return "Z"
        return " & ".join(f"{{{to_text(q)}}} in (-{d}, {d})" for q, d in self.conditions)


def frac_in_window(v: ExactScalar, delta: Fraction) -> bool:
    """Decide {v} in (-delta, delta), exactly."""
    if v.is_rational():
        x = v.rational()
        f = x - math.ceil(x - HALF)
        return -delta < f < delta
    # fast path: one enclosure usually separates the fraction from the window edges
    lo, hi = v.enclosure(64)
    one = 1 << 64
    k = (lo + (one >> 1)) >> 64
    f_lo, f_hi = lo - k * one, hi - k * one
    d_lo, d_hi = math.floor(delta * one), math.ceil(delta * one)
    if -(one >> 1) < f_lo and f_hi < (one >> 1):
        if -d_lo < f_lo and f_hi < d_lo:
            return True
        if f_lo >= d_hi or f_hi <= -d_hi:
            return False
    f = v - nearest_int(v)
    return (f + delta).sign() > 0 and (delta - f).sign() > 0


def c_membership(n: int, C: ConstraintSet) -> bool:
    for q, delta in C.conditions:
        if not frac_in_window(evaluate(q, n), delta):
            return False
    return True


def _monomial_condition(q: GPExpr):
    if len(q.terms) == 1:
        (k, brs), c = q.terms[0]
        if not brs:
            return c, k
    return None


def _scan_condition(q: GPExpr, delta: Fraction, lo: int, hi: int, alive: bytearray):
    mono = _monomial_condition(q)
    if mono is not None and _kernels.monomial_window_scan is not None:
        c, k = mono
        clo, chi = c.enclosure(64)
        one = 1 << 64
        status = _kernels.monomial_window_scan(
            clo % one, chi - clo, k, lo, hi,
            math.floor(delta * one), math.ceil(delta * one),
        )
        for i, s in enumerate(status):
            if not alive[i]:
                continue
            if s == _kernels.OUTSIDE:
                alive[i] = 0
            elif s == _kernels.UNDECIDED:
                alive[i] = frac_in_window(evaluate(q, lo + i), delta)
        return
    for i in range(hi - lo + 1):
        if alive[i] and not frac_in_window(evaluate(q, lo + i), delta):
            alive[i] = 0


def _enumerate_range(args) -> list:
    C, lo, hi = args
    alive = bytearray(b"\x01") * (hi - lo + 1)
    # cheap monomial conditions first so later ones see fewer survivors
    order = sorted(C.conditions, key=lambda qd: _monomial_condition(qd[0]) is None)
    for q, delta in order:
        _scan_condition(q, delta, lo, hi, alive)
    return [lo + i for i, a in enumerate(alive) if a]


def c_enumerate(C: ConstraintSet, lo: int, hi: int, *, budget: int = DEFAULT_ENUM_BUDGET,
                jobs: int = 1) -> list:
    """Sorted members of C in [lo, hi]."""
    if lo > hi:
        raise ValueError("lo must not exceed hi")
    if hi - lo + 1 > budget:
        raise BudgetExceeded(f"range of {hi - lo + 1} exceeds budget {budget}")
    if jobs <= 1 or hi - lo < 2000:
        return _enumerate_range((C, lo, hi))
    step = -(-(hi - lo + 1) // jobs)
    chunks = [(C, a, min(hi, a + step - 1)) for a in range(lo, hi + 1, step)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(_enumerate_range, chunks))
    return [n for part in parts for n in part]


def c_intersect(a: ConstraintSet, b: ConstraintSet) -> ConstraintSet:
    seen = set()
    out = []
    for cond in a.conditions + b.conditions:
        if cond not in seen:
            seen.add(cond)
            out.append(cond)
    return ConstraintSet(tuple(out))


def ip_intersection_witness(C: ConstraintSet, gens: Sequence[int], budget: int = 1 << 16
                            ) -> FiniteIndexSet:
    """A support alpha with n_alpha in C.

    Values are visited by the largest index of their support, then in the
    order they are first reached; each distinct finite-sum value is tested
    once and counts once against ``budget``.
    """
    gens = list(gens)
    reach = {0: ()}
    examined = 0
    for i, g in enumerate(gens, 1):
        for value, sup in list(reach.items()):
            t = value + g
            if t in reach:
                continue
            if examined >= budget:
                raise NotFound(f"no finite sum in the set within budget {budget}")
            examined += 1
            reach[t] = sup + (i,)
            if t != 0 and c_membership(t, C):
                return FiniteIndexSet(reach[t])
    raise NotFound("generators exhausted without a finite sum in the set")
