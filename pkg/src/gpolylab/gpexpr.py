"""Generalized polynomials in one integer variable ``n``.

Expressions are kept in a canonical sum-of-products form: a finite sum of
``coeff * n^k * B_1 * ... * B_r`` where each ``B_i`` is a bracket atom
(``ni(...)`` nearest integer, ``fl(...)`` floor) around another canonical
expression.  Products are expanded and like terms merged, so two
expressions are structurally equal exactly when their canonical term lists
agree.  Cancellation is syntactic: distinct bracket atoms never merge.

Text grammar::

    expr   := term (("+" | "-") term)*
    term   := factor ("*" factor)*
    factor := scalar | "n" ["^" uint] | "ni(" expr ")" | "fl(" expr ")"
            | "(" expr ")" | "-" factor
    scalar := uint ["/" uint] | "sqrt(" uint ")" | ("pi" | "e") ["^" uint]
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Union

from .scalar import ExactScalar, as_scalar

__all__ = [
    "Bracket",
    "GPExpr",
    "GPSyntaxError",
    "GPValueError",
    "FiniteIndexSet",
    "ZERO",
    "N",
    "monomial",
    "nearest",
    "floor_",
    "scalar_mul",
    "parse",
    "parse_scalar",
    "to_text",
    "degree",
    "substitute_scale",
]


class GPSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.reason = message


class GPValueError(ValueError):
    """Expression is outside the generalized-polynomial class."""


Key = tuple  # (power, tuple[Bracket, ...])


@dataclass(frozen=True)
class Bracket:
    kind: str  # "ni" or "fl"
    inner: "GPExpr"

    @property
    def order(self):
        return (self.kind, self.inner.order)

    def degree(self) -> int:
        return self.inner.degree()

    def __str__(self):
        return f"{self.kind}({to_text(self.inner)})"


def _key_order(key: Key):
    return (key[0], tuple(b.order for b in key[1]))


def _key_degree(key: Key) -> int:
    return key[0] + sum(b.degree() for b in key[1])


def _key_mul(a: Key, b: Key) -> Key:
    return (a[0] + b[0], tuple(sorted(a[1] + b[1], key=lambda br: br.order)))


class GPExpr:
    """Canonical generalized polynomial (immutable, hashable)."""

    __slots__ = ("terms", "_hash", "_order", "_degree")

    def __init__(self, terms: Iterable[tuple[Key, ExactScalar]] = ()):
        acc: dict = {}
        for key, c in terms:
            acc[key] = acc.get(key, ExactScalar(0)) + c
        items = [(k, c) for k, c in acc.items() if not c.is_zero()]
        items.sort(key=lambda kc: _key_order(kc[0]))
        self.terms = tuple(items)
        self._hash = None
        self._order = None
        self._degree = None

    # -- structure ---------------------------------------------------------
    @property
    def order(self):
        if self._order is None:
            self._order = tuple((_key_order(k), c.terms) for k, c in self.terms)
        return self._order

    def degree(self) -> int:
        if self._degree is None:
            self._degree = max((_key_degree(k) for k, _ in self.terms), default=0)
        return self._degree

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> ExactScalar:
        for key, c in self.terms:
            if key == (0, ()):
                return c
        return ExactScalar(0)

    def without_constant(self) -> "GPExpr":
        return GPExpr((k, c) for k, c in self.terms if k != (0, ()))

    def brackets(self) -> Iterator[Bracket]:
        """Every bracket atom, outermost first, with repetition removed."""
        seen = set()
        stack = [self]
        while stack:
            e = stack.pop(0)
            for key, _ in e.terms:
                for b in key[1]:
                    if b not in seen:
                        seen.add(b)
                        yield b
                        stack.append(b.inner)

    def is_integer_valued(self) -> bool:
        """Syntactic check: integer coefficients on n-powers and brackets."""
        return all(c.is_integer() for _, c in self.terms)

    def is_bracket_free(self) -> bool:
        return all(not key[1] for key, _ in self.terms)

    # -- algebra -----------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        return GPExpr(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return GPExpr((k, -c) for k, c in self.terms)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        return GPExpr(
            (_key_mul(k1, k2), c1 * c2)
            for k1, c1 in self.terms
            for k2, c2 in other.terms
        )

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = GPExpr.const(1)
        for _ in range(k):
            out = out * self
        return out

    @classmethod
    def const(cls, c) -> "GPExpr":
        c = as_scalar(c)
        return cls([((0, ()), c)])

    def __eq__(self, other):
        if isinstance(other, GPExpr):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.terms)
        return self._hash

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"GPExpr({to_text(self)!r})"

    def to_json(self) -> dict:
        return {
            "sum": [
                {
                    "coeff": c.to_json(),
                    "power": key[0],
                    "brackets": [{"kind": b.kind, "inner": b.inner.to_json()} for b in key[1]],
                }
                for key, c in self.terms
            ]
        }

    @classmethod
    def from_json(cls, data: dict) -> "GPExpr":
        out = ZERO
        for t in data["sum"]:
            term = GPExpr([((int(t["power"]), ()), ExactScalar.from_json(t["coeff"]))])
            for b in t["brackets"]:
                inner = cls.from_json(b["inner"])
                term = term * (nearest(inner) if b["kind"] == "ni" else floor_(inner))
            out = out + term
        return out


def _coerce(x) -> GPExpr:
    if isinstance(x, GPExpr):
        return x
    return GPExpr.const(x)


ZERO = GPExpr()
N = GPExpr([((1, ()), ExactScalar(1))])


def monomial(coeff, power: int) -> GPExpr:
    if power < 0:
        raise GPValueError("negative power")
    return GPExpr([((power, ()), as_scalar(coeff))])


def _bracket(kind: str, e: GPExpr) -> GPExpr:
    if e.is_zero():
        return ZERO
    if e.is_integer_valued():
        return e
    return GPExpr([((0, (Bracket(kind, e),)), ExactScalar(1))])


def nearest(e: GPExpr) -> GPExpr:
    """ni(e); integer-valued arguments are returned unchanged."""
    return _bracket("ni", _coerce(e))


def floor_(e: GPExpr) -> GPExpr:
    return _bracket("fl", _coerce(e))


def scalar_mul(c, e: GPExpr) -> GPExpr:
    return GPExpr.const(c) * _coerce(e)


def degree(e: GPExpr) -> int:
    return e.degree()


def substitute_scale(e: GPExpr, q: int) -> GPExpr:
    """The expression n -> e(q*n)."""
    out = []
    for (k, brs), c in e.terms:
        term = GPExpr([((k, ()), c * q**k)])
        for b in brs:
            term = term * _bracket(b.kind, substitute_scale(b.inner, q))
        out.extend(term.terms)
    return GPExpr(out)


def check_gp(e: GPExpr) -> GPExpr:
    """Reject constant terms anywhere (every stored expression vanishes at 0)."""
    for key, c in e.terms:
        if key == (0, ()):
            raise GPValueError(f"constant term {c} is not allowed (expressions must vanish at n = 0)")
        for b in key[1]:
            check_gp(b.inner)
    return e


# --------------------------------------------------------------------------
# printing


def _coeff_prefix(c: ExactScalar) -> tuple[bool, str]:
    """(negative, text) for a coefficient preceding other factors."""
    if len(c.terms) == 1:
        mono, v = c.terms[0]
        neg = v < 0
        mag = ExactScalar._from_map({mono: abs(v)})
        return neg, ("" if mag == 1 else str(mag))
    return False, f"({c})"


def _term_text(key: Key, c: ExactScalar) -> tuple[bool, str]:
    k, brs = key
    factors = []
    if k == 1:
        factors.append("n")
    elif k > 1:
        factors.append(f"n^{k}")
    factors.extend(str(b) for b in brs)
    if not factors:
        if len(c.terms) == 1:
            v = c.terms[0][1]
            return v < 0, str(-c if v < 0 else c)
        return False, f"({c})"
    neg, prefix = _coeff_prefix(c)
    if prefix:
        factors.insert(0, prefix)
    return neg, "*".join(factors)


def _print_order(item):
    key, _ = item
    return (-_key_degree(key), _key_order(key))


def to_text(e: GPExpr) -> str:
    if e.is_zero():
        return "0"
    parts = []
    for i, (key, c) in enumerate(sorted(e.terms, key=_print_order)):
        neg, text = _term_text(key, c)
        if i == 0:
            parts.append(("-" if neg else "") + text)
        else:
            parts.append((" - " if neg else " + ") + text)
    return "".join(parts)


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]+)|(\S))")


@dataclass
class _Tok:
    kind: str  # "int", "name", "op", "end"
    text: str
    pos: int  # 1-based offset


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos and not m.group(0):
            break
        if m.group(1):
            toks.append(_Tok("int", m.group(1), m.start(1) + 1))
        elif m.group(2):
            toks.append(_Tok("name", m.group(2), m.start(2) + 1))
        elif m.group(3):
            toks.append(_Tok("op", m.group(3), m.start(3) + 1))
        else:
            break
        pos = m.end()
    toks.append(_Tok("end", "", len(text) + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str):
        t = self.take()
        if t.text != text or t.kind == "end":
            what = "end of input" if t.kind == "end" else repr(t.text)
            raise GPSyntaxError(f"expected {text!r}, found {what}", t.pos)

    def uint(self, what: str) -> int:
        t = self.take()
        if t.kind != "int":
            raise GPSyntaxError(f"{what} must be a non-negative integer", t.pos)
        nxt = self.peek()
        if nxt.kind == "op" and nxt.text == ".":
            raise GPSyntaxError(f"{what} must be a non-negative integer", nxt.pos)
        return int(t.text)

    def expr(self) -> GPExpr:
        out = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.take().text
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> GPExpr:
        out = self.factor()
        while self.peek().kind == "op" and self.peek().text == "*":
            self.take()
            out = out * self.factor()
        return out

    def power(self, what: str) -> int:
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            return self.uint(f"exponent of {what}")
        return 1

    def factor(self) -> GPExpr:
        t = self.take()
        if t.kind == "op" and t.text == "-":
            return -self.factor()
        if t.kind == "op" and t.text == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if t.kind == "int":
            num = int(t.text)
            if self.peek().kind == "op" and self.peek().text == "/":
                self.take()
                den_tok = self.peek()
                den = self.uint("denominator")
                if den == 0:
                    raise GPSyntaxError("zero denominator", den_tok.pos)
                return GPExpr.const(Fraction(num, den))
            return GPExpr.const(num)
        if t.kind == "name":
            name = t.text
            if name == "n":
                return monomial(1, self.power("n"))
            if name in ("ni", "fl"):
                self.expect("(")
                inner = self.expr()
                self.expect(")")
                return nearest(inner) if name == "ni" else floor_(inner)
            if name == "sqrt":
                self.expect("(")
                k = self.uint("sqrt argument")
                self.expect(")")
                return GPExpr.const(ExactScalar.sqrt(k))
            if name == "pi":
                return GPExpr.const(ExactScalar.pi() ** self.power("pi"))
            if name == "e":
                return GPExpr.const(ExactScalar.e() ** self.power("e"))
            raise GPSyntaxError(f"unknown name {name!r} (constants: sqrt(k), pi, e)", t.pos)
        if t.kind == "end":
            raise GPSyntaxError("unexpected end of input", t.pos)
        raise GPSyntaxError(f"unexpected {t.text!r}", t.pos)

    def finish(self):
        t = self.peek()
        if t.kind != "end":
            raise GPSyntaxError(f"unexpected {t.text!r}", t.pos)


def parse(text: str) -> GPExpr:
    """Parse a generalized polynomial; constant terms are rejected."""
    p = _Parser(text)
    e = p.expr()
    p.finish()
    try:
        return check_gp(e)
    except GPValueError as exc:
        raise GPSyntaxError(str(exc), 1) from None


def parse_scalar(text: str) -> ExactScalar:
    p = _Parser(text)
    e = p.expr()
    p.finish()
    if any(key != (0, ()) for key, _ in e.terms):
        raise GPSyntaxError("scalar expression may not mention n or brackets", 1)
    return e.constant_term()


# --------------------------------------------------------------------------


class FiniteIndexSet(tuple):
    """Non-empty strictly increasing tuple of positive integers."""

    def __new__(cls, items: Iterable[int]):
        vals = tuple(sorted(set(int(i) for i in items)))
        if not vals:
            raise ValueError("index set must be non-empty")
        if vals[0] < 1:
            raise ValueError("indices are positive")
        return super().__new__(cls, vals)

    def precedes(self, other) -> bool:
        """alpha < beta in the sense max(alpha) < min(beta)."""
        return self[-1] < other[0]

    def disjoint(self, other) -> bool:
        return not set(self) & set(other)


Expr = Union[GPExpr, str]


def as_expr(e: Expr) -> GPExpr:
    return parse(e) if isinstance(e, str) else e
