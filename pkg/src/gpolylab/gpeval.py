"""Exact evaluation of generalized polynomials at integer points."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor
from typing import Optional, Sequence

from .gpexpr import Bracket, GPExpr, as_expr
from .scalar import ExactScalar, PrecisionError, as_scalar, precision_cap, scalar_sum

__all__ = [
    "FracValue",
    "NonIntegerValue",
    "RangeError",
    "TieUndecidable",
    "nearest_int",
    "floor_int",
    "frac",
    "evaluate",
    "eval_int",
    "eval_trace",
    "bracket_sum_check",
]

INT64_MAX = (1 << 63) - 1
HALF = Fraction(1, 2)


class TieUndecidable(PrecisionError):
    """A bracket value sits too close to a tie to separate within the cap."""


class NonIntegerValue(ValueError):
    pass


class RangeError(OverflowError):
    pass


def _floor_irrational(a: ExactScalar) -> int:
    # a is not rational, so it is not an integer: refine until lo, hi share a floor
    cap = precision_cap()
    w = 64
    while w <= cap:
        lo, hi = a.enclosure(w)
        k_lo, k_hi = lo >> w, hi >> w
        if k_lo == k_hi:
            return k_lo
        w *= 2
    raise TieUndecidable(f"cannot separate {a} from an integer within {cap} bits")


def floor_int(a) -> int:
    """Greatest integer not exceeding ``a``."""
    a = as_scalar(a)
    if a.is_rational():
        return floor(a.rational())
    return _floor_irrational(a)


def nearest_int(a) -> int:
    """Smallest integer among those nearest to ``a`` (ties go down)."""
    a = as_scalar(a)
    if a.is_rational():
        return ceil(a.rational() - HALF)
    # a - 1/2 is irrational, so ceil = floor + 1
    return _floor_irrational(a - HALF) + 1


@dataclass(frozen=True)
class FracValue:
    value: ExactScalar
    flavor: str  # "nearest" in (-1/2, 1/2], "floor" in [0, 1)
    bracket: int

    def __float__(self):
        return float(self.value)


def frac(a, flavor: str = "nearest") -> FracValue:
    a = as_scalar(a)
    if flavor == "nearest":
        k = nearest_int(a)
    elif flavor == "floor":
        k = floor_int(a)
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    return FracValue(a - k, flavor, k)


def _bracket_value(b: Bracket, n: int, cache: dict, trace: Optional[list]) -> int:
    hit = cache.get(b)
    if hit is not None:
        return hit
    inner = _eval(b.inner, n, cache, trace)
    v = nearest_int(inner) if b.kind == "ni" else floor_int(inner)
    cache[b] = v
    if trace is not None:
        trace.append({"bracket": str(b), "value": v, "frac": str(inner - v)})
    return v


def _eval(e: GPExpr, n: int, cache: dict, trace: Optional[list]) -> ExactScalar:
    parts = []
    for (k, brs), c in e.terms:
        m = n**k
        for b in brs:
            m *= _bracket_value(b, n, cache, trace)
            if not m:
                break
        if m:
            parts.append(c * m)
    return scalar_sum(parts)


def _check_range(n: int):
    if not isinstance(n, int):
        raise TypeError("n must be an integer")
    if abs(n) > INT64_MAX:
        raise RangeError(f"|n| = {abs(n)} exceeds the 64-bit range")


def evaluate(expr, n: int) -> ExactScalar:
    """Exact real value of ``expr`` at ``n``."""
    _check_range(n)
    return _eval(as_expr(expr), n, {}, None)


def eval_trace(expr, n: int) -> tuple[ExactScalar, list]:
    _check_range(n)
    trace: list = []
    return _eval(as_expr(expr), n, {}, trace), trace


def eval_int(expr, n: int) -> int:
    """Exact integer value; raises ``NonIntegerValue`` otherwise."""
    v = evaluate(expr, n)
    if not v.is_integer():
        raise NonIntegerValue(f"{as_expr(expr)} is not an integer at n = {n} (value {v})")
    return int(v.rational())


def bracket_sum_check(rs: Sequence) -> tuple[bool, bool, bool, bool]:
    """Hypotheses and conclusions of bracket additivity, checked independently.

    Returns (condition_nearest, identity_nearest, condition_floor,
    identity_floor).
    """
    rs = [as_scalar(r) for r in rs]
    if not rs:
        raise ValueError("need at least one scalar")
    total = scalar_sum(rs)
    nearest_fracs = scalar_sum(r - nearest_int(r) for r in rs)
    cond_n = (nearest_fracs + HALF).sign() > 0 and (HALF - nearest_fracs).sign() >= 0
    id_n = nearest_int(total) == sum(nearest_int(r) for r in rs)
    floor_fracs = scalar_sum(r - floor_int(r) for r in rs)
    cond_f = floor_fracs.sign() >= 0 and (1 - floor_fracs).sign() > 0
    id_f = floor_int(total) == sum(floor_int(r) for r in rs)
    return cond_n, id_n, cond_f, id_f
