"""Exact scalars over the rationals extended by square roots, pi and e.

A value is a finite sum of terms ``c * sqrt(r) * pi^a * e^b`` with ``c``
rational and ``r`` square-free.  Zero-testing is syntactic on this canonical
form; signs of nonzero values are decided by rigorous interval refinement.
"""

from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

__all__ = [
    "ExactScalar",
    "Interval",
    "PrecisionError",
    "ScalarError",
    "as_scalar",
    "precision_cap",
    "scalar_arith",
    "scalar_sign",
    "scalar_interval",
    "scalar_sum",
]

DEFAULT_PRECISION_CAP = 4096

Monomial = tuple  # (radicand, pi power, e power)
_ONE = (1, 0, 0)

Number = Union[int, Fraction, "ExactScalar"]


class ScalarError(ArithmeticError):
    """Invalid scalar operation (e.g. division by a non-rational)."""


class PrecisionError(ArithmeticError):
    """Interval refinement hit the precision cap without deciding."""


def precision_cap() -> int:
    raw = os.environ.get("GPOLYLAB_PRECISION_CAP")
    if raw:
        try:
            cap = int(raw)
        except ValueError:
            raise ScalarError(f"GPOLYLAB_PRECISION_CAP must be an integer, got {raw!r}")
        if cap < 64:
            raise ScalarError("GPOLYLAB_PRECISION_CAP must be at least 64")
        return cap
    return DEFAULT_PRECISION_CAP


@lru_cache(maxsize=4096)
def _squarefree_split(k: int) -> tuple[int, int]:
    """Return (s, r) with k = s^2 * r and r square-free."""
    s, r = 1, 1
    d = 2
    while d * d <= k:
        e = 0
        while k % d == 0:
            k //= d
            e += 1
        s *= d ** (e // 2)
        if e % 2:
            r *= d
        d += 1 if d == 2 else 2
    return s, r * k


def _mono_mul(a: Monomial, b: Monomial) -> tuple[int, Monomial]:
    g = math.gcd(a[0], b[0])
    return g, (a[0] // g * (b[0] // g), a[1] + b[1], a[2] + b[2])


# --------------------------------------------------------------------------
# digit oracles

_oracle_lock = threading.Lock()
_pi_cache: dict[int, tuple[int, int]] = {}
_e_cache: dict[int, tuple[int, int]] = {}


def _arctan_inv(x: int, w: int) -> tuple[int, int]:
    # floor(floor(a)/b) == floor(a/b), so each power is an exact floor
    power = (1 << w) // x
    x2 = x * x
    total = 0
    k = 0
    while power:
        term = power // (2 * k + 1)
        total += -term if k & 1 else term
        power //= x2
        k += 1
    return total, k + 1


def _shift_out(lo: int, hi: int, guard: int) -> tuple[int, int]:
    return lo >> guard, -((-hi) >> guard)


def _pi_enclosure(w: int) -> tuple[int, int]:
    """(lo, hi) with lo <= pi * 2^w <= hi."""
    with _oracle_lock:
        hit = _pi_cache.get(w)
        if hit is None:
            guard = 24 + w.bit_length()
            big = w + guard
            a5, e5 = _arctan_inv(5, big)
            a239, e239 = _arctan_inv(239, big)
            approx = 16 * a5 - 4 * a239
            err = 16 * e5 + 4 * e239
            hit = _shift_out(approx - err, approx + err, guard)
            _pi_cache[w] = hit
        return hit


def _e_enclosure(w: int) -> tuple[int, int]:
    """(lo, hi) with lo <= e * 2^w <= hi."""
    with _oracle_lock:
        hit = _e_cache.get(w)
        if hit is None:
            guard = 24 + w.bit_length()
            big = w + guard
            term = 1 << big
            total = 0
            k = 0
            while term:
                total += term
                k += 1
                term //= k
            err = k + 2
            hit = _shift_out(total - err, total + err, guard)
            _e_cache[w] = hit
        return hit


def _imul(a: tuple[int, int], b: tuple[int, int], w: int) -> tuple[int, int]:
    # both enclosures nonnegative
    return (a[0] * b[0]) >> w, -((-(a[1] * b[1])) >> w)


@lru_cache(maxsize=8192)
def _mono_enclosure(mono: Monomial, w: int) -> tuple[int, int]:
    r, p, q = mono
    one = 1 << w
    enc = (one, one)
    if r > 1:
        s = math.isqrt(r << (2 * w))
        enc = (s, s + 1)
    for _ in range(p):
        enc = _imul(enc, _pi_enclosure(w), w)
    for _ in range(q):
        enc = _imul(enc, _e_enclosure(w), w)
    return enc


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    """Closed interval with dyadic endpoints."""

    lower: Fraction
    upper: Fraction
    precision: int

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("empty interval")

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def contains(self, x) -> bool:
        return self.lower <= x <= self.upper

    def subset_of(self, other: "Interval") -> bool:
        return other.lower <= self.lower and self.upper <= other.upper

    def __str__(self):
        return f"[{float(self.lower):.12g}, {float(self.upper):.12g}]"


class ExactScalar:
    """Immutable element of Q[sqrt(k), pi, e] in canonical form."""

    __slots__ = ("terms", "_hash")

    def __init__(self, value: Number = 0):
        if isinstance(value, ExactScalar):
            self.terms = value.terms
        elif isinstance(value, (int, Fraction)):
            v = Fraction(value)
            self.terms = ((_ONE, v),) if v else ()
        else:
            raise TypeError(f"cannot build an ExactScalar from {type(value).__name__}")
        self._hash = None

    @classmethod
    def _from_map(cls, m: dict) -> "ExactScalar":
        obj = cls.__new__(cls)
        obj.terms = tuple(sorted((k, v) for k, v in m.items() if v))
        obj._hash = None
        return obj

    # -- constructors -----------------------------------------------------
    @classmethod
    def sqrt(cls, k: int) -> "ExactScalar":
        if not isinstance(k, int) or k < 0:
            raise ScalarError(f"sqrt needs a nonnegative integer, got {k!r}")
        if k == 0:
            return cls(0)
        s, r = _squarefree_split(k)
        return cls._from_map({(r, 0, 0): Fraction(s)})

    @classmethod
    def pi(cls) -> "ExactScalar":
        return cls._from_map({(1, 1, 0): Fraction(1)})

    @classmethod
    def e(cls) -> "ExactScalar":
        return cls._from_map({(1, 0, 1): Fraction(1)})

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0] == _ONE)

    def is_integer(self) -> bool:
        return self.is_rational() and self.rational().denominator == 1

    def rational(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_rational():
            raise ScalarError(f"{self} is not rational")
        return self.terms[0][1]

    def uses_transcendentals(self) -> bool:
        """True when a nonzero/sign decision relies on pi, e being independent."""
        return any(m[1] or m[2] for m, _ in self.terms)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        m = dict(self.terms)
        for k, v in other.terms:
            m[k] = m.get(k, 0) + v
        return ExactScalar._from_map(m)

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar._from_map({k: -v for k, v in self.terms})

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if other.is_rational():
            c = other.rational()
            return ExactScalar._from_map({k: v * c for k, v in self.terms})
        m: dict = {}
        for k1, v1 in self.terms:
            for k2, v2 in other.terms:
                g, k = _mono_mul(k1, k2)
                m[k] = m.get(k, 0) + v1 * v2 * g
        return ExactScalar._from_map(m)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not other.is_rational():
            raise ScalarError(f"division by non-rational scalar {other}")
        c = other.rational()
        if c == 0:
            raise ZeroDivisionError("scalar division by zero")
        return ExactScalar._from_map({k: v / c for k, v in self.terms})

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ScalarError("only nonnegative integer powers are supported")
        out = ExactScalar(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return False
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.terms)
        return self._hash

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __bool__(self):
        return bool(self.terms)

    # -- numerics ---------------------------------------------------------
    def enclosure(self, w: int) -> tuple[int, int]:
        """Integers (lo, hi) with lo <= value * 2^w <= hi."""
        lo_t = hi_t = 0
        for mono, c in self.terms:
            mlo, mhi = _mono_enclosure(mono, w)
            num, den = c.numerator, c.denominator
            if num >= 0:
                lo_t += (mlo * num) // den
                hi_t += -((-mhi * num) // den)
            else:
                lo_t += (mhi * num) // den
                hi_t += -((-mlo * num) // den)
        return lo_t, hi_t

    def sign(self) -> int:
        if not self.terms:
            return 0
        if self.is_rational():
            v = self.terms[0][1]
            return (v > 0) - (v < 0)
        cap = precision_cap()
        w = 64
        while w <= cap:
            lo, hi = self.enclosure(w)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            w *= 2
        raise PrecisionError(f"sign of {self} undecided at {cap} bits")

    def interval(self, bits: int) -> Interval:
        """Enclosing interval of width <= 2^(1-bits) * (1 + |value| bound).

        Intervals for a fixed value are nested in ``bits``: they intersect a
        fixed refinement ladder and stop at the first level that is narrow
        enough.
        """
        if bits < 1:
            raise ValueError("bits must be >= 1")
        if not self.terms:
            return Interval(Fraction(0), Fraction(0), bits)
        lo = hi = None
        w = 32
        while True:
            a, b = self.enclosure(w)
            fa, fb = Fraction(a, 1 << w), Fraction(b, 1 << w)
            lo = fa if lo is None else max(lo, fa)
            hi = fb if hi is None else min(hi, fb)
            mag = max(abs(lo), abs(hi))
            if (hi - lo) <= Fraction(2) ** (1 - bits) * (1 + mag):
                return Interval(lo, hi, bits)
            w *= 2

    def __float__(self):
        lo, hi = self.enclosure(64)
        return (lo + hi) / 2 / 2.0**64

    # -- text / json ------------------------------------------------------
    def to_json(self) -> list:
        return [
            {"coeff": str(c), "sqrt": m[0], "pi": m[1], "e": m[2]}
            for m, c in self.terms
        ]

    @classmethod
    def from_json(cls, data: list) -> "ExactScalar":
        m: dict = {}
        for t in data:
            mono = (int(t.get("sqrt", 1)), int(t.get("pi", 0)), int(t.get("e", 0)))
            if mono[0] < 1 or _squarefree_split(mono[0])[0] != 1:
                raise ScalarError(f"radicand {mono[0]} is not square-free")
            m[mono] = m.get(mono, 0) + Fraction(t["coeff"])
        return cls._from_map(m)

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for i, (mono, c) in enumerate(self.terms):
            text = _term_text(mono, abs(c))
            if i == 0:
                out.append(("-" if c < 0 else "") + text)
            else:
                out.append((" - " if c < 0 else " + ") + text)
        return "".join(out)

    def __repr__(self):
        return f"ExactScalar({str(self)!r})"


def _mono_factors(mono: Monomial) -> list[str]:
    r, p, q = mono
    f = []
    if r > 1:
        f.append(f"sqrt({r})")
    if p:
        f.append("pi" if p == 1 else f"pi^{p}")
    if q:
        f.append("e" if q == 1 else f"e^{q}")
    return f


def _term_text(mono: Monomial, c: Fraction) -> str:
    factors = _mono_factors(mono)
    if c != 1 or not factors:
        factors.insert(0, str(c))
    return "*".join(factors)


def _coerce(x):
    if isinstance(x, ExactScalar):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return ExactScalar(x)
    return NotImplemented


def as_scalar(x) -> ExactScalar:
    s = _coerce(x)
    if s is NotImplemented:
        raise TypeError(f"not a scalar: {x!r}")
    return s


# --------------------------------------------------------------------------
# operation-level API


def scalar_arith(op: str, a: Number, b: Number) -> ExactScalar:
    a, b = as_scalar(a), as_scalar(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "rational_div":
        return a / b
    raise ValueError(f"unknown scalar op {op!r}")


_SIGN_NAMES = {-1: "negative", 0: "zero", 1: "positive"}


def scalar_sign(a: Number) -> str:
    return _SIGN_NAMES[as_scalar(a).sign()]


def scalar_interval(a: Number, bits: int) -> Interval:
    return as_scalar(a).interval(bits)


def scalar_sum(values: Iterable[Number]) -> ExactScalar:
    m: dict = {}
    for v in values:
        for k, c in as_scalar(v).terms:
            m[k] = m.get(k, 0) + c
    return ExactScalar._from_map(m)
