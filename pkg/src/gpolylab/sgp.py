"""Normal form: integer combinations of brackets around simple products.

A *simple term* is a single monomial ``a * n^j * ni(h_1) * ... * ni(h_r)``
whose bracket arguments are again simple terms.  A linear nesting
``a1 n^j1 ni(a2 n^j2 ni(... ni(al n^jl)))`` is an L-chain; products of
chains are simple terms.

``to_sgp_normal`` rewrites an expression into ``sum c_i ni(q_i) + poly``
with integer ``c_i`` and simple ``q_i``, valid on a returned constraint
set.  Only two rewrites are used:

* splitting ``ni(r_1 + ... + r_K)`` into ``ni(r_1) + ... + ni(r_K)`` on
  ``{r_i} in (-1/(2K), 1/(2K))``; integer-valued summands leave the
  bracket with no condition;
* collapsing ``ni(a ni(x))`` to ``ni(a x)`` on ``{a x}, {a ni(x)}`` in
  ``(-1/4, 1/4)`` and ``{x}`` in ``(-1/(4|a|), 1/(4|a|))``.

Everything else raises ``UnsupportedPattern``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .constraints import ConstraintSet
from .gpexpr import Bracket, GPExpr, ZERO, as_expr, monomial, nearest, to_text
from .scalar import ExactScalar, as_scalar

__all__ = [
    "UnsupportedPattern",
    "SGPForm",
    "is_simple",
    "l_chain",
    "l_chains",
    "to_sgp_normal",
]

QUARTER = Fraction(1, 4)


class UnsupportedPattern(ValueError):
    """The expression is outside the implemented rewrite fragment."""


def is_simple(g: GPExpr) -> bool:
    if len(g.terms) != 1:
        return False
    (k, brs), _ = g.terms[0]
    if k == 0 and not brs:
        return False
    return all(b.kind == "ni" and is_simple(b.inner) for b in brs)


def l_chain(*pairs) -> GPExpr:
    """L(a1 n^j1, ..., al n^jl) = a1 n^j1 ni(L(a2 n^j2, ...))."""
    if not pairs:
        raise ValueError("an L-chain needs at least one entry")
    out = None
    for a, j in reversed(pairs):
        head = monomial(a, j)
        out = head if out is None else head * nearest(out)
    return out


def _chain_of(term_key, coeff) -> tuple:
    k, brs = term_key
    if len(brs) > 1:
        raise UnsupportedPattern("bracket argument is a product, not a single chain")
    link = ((coeff, k),)
    if not brs:
        return link
    (key, c), = brs[0].inner.terms
    return link + _chain_of(key, c)


def l_chains(q: GPExpr) -> tuple:
    """Split a simple term into L-chains, each a tuple of (coeff, power).

    The coefficient goes on the first chain; the others start with (1, 0).
    """
    if not is_simple(q):
        raise UnsupportedPattern(f"{to_text(q)} is not a simple product")
    ((k, brs), c), = q.terms
    if not brs:
        return (((c, k),),)
    chains = []
    for i, b in enumerate(brs):
        (key, bc), = b.inner.terms
        head = (c, k) if i == 0 else (ExactScalar(1), 0)
        chains.append((head,) + _chain_of(key, bc))
    return tuple(chains)


@dataclass(frozen=True)
class SGPForm:
    terms: tuple  # (int, simple GPExpr) pairs
    poly: GPExpr = ZERO

    def to_expr(self) -> GPExpr:
        out = self.poly
        for c, q in self.terms:
            out = out + GPExpr.const(c) * nearest(q)
        return out

    def degree(self) -> int:
        return self.to_expr().degree()

    def __str__(self):
        return to_text(self.to_expr())

    def to_json(self) -> dict:
        return {
            "terms": [{"c": c, "q": to_text(q)} for c, q in self.terms],
            "poly": to_text(self.poly),
        }


def _lower_quarter_over(a: ExactScalar) -> Fraction:
    """A rational r with 0 < r <= 1/(4|a|)."""
    a = abs(a)
    if a.is_rational():
        return 1 / (4 * a.rational())
    _, hi = a.enclosure(64)
    return Fraction(1 << 64, 4 * hi)


class _Normalizer:
    def __init__(self):
        self.conds: list = []

    def add(self, q: GPExpr, delta: Fraction):
        self.conds.append((q, delta))

    def inner(self, g: GPExpr) -> GPExpr:
        out = ZERO
        for (k, brs), c in g.terms:
            term = GPExpr([((k, ()), c)])
            for b in brs:
                term = term * self.bracket(b)
            out = out + term
        return out

    def bracket(self, b: Bracket) -> GPExpr:
        if b.kind != "ni":
            raise UnsupportedPattern("floor brackets are outside the normal-form fragment")
        g = self.inner(b.inner)
        ints = GPExpr(t for t in g.terms if t[1].is_integer())
        rest = [t for t in g.terms if not t[1].is_integer()]
        if not rest:
            return ints
        if len(rest) == 1:
            return ints + self.single(GPExpr(rest))
        window = Fraction(1, 2 * len(rest))
        out = ints
        for t in rest:
            r = GPExpr([t])
            self.add(r, window)
            out = out + self.single(r)
        return out

    def single(self, r: GPExpr) -> GPExpr:
        ((k, brs), a), = r.terms
        if k == 0 and not brs:
            raise UnsupportedPattern(f"constant {a} inside a bracket")
        if k == 0 and len(brs) == 1:
            x = brs[0].inner
            ax = GPExpr.const(a) * x
            self.add(ax, QUARTER)
            self.add(r, QUARTER)
            self.add(x, _lower_quarter_over(a))
            return nearest(ax)
        if not is_simple(r):
            raise UnsupportedPattern(f"{to_text(r)} is not a simple product")
        return nearest(r)


def to_sgp_normal(expr) -> tuple[SGPForm, ConstraintSet]:
    """Normal form ``h`` and a set ``C`` with ``expr = h`` on ``C``."""
    expr = as_expr(expr)
    norm = _Normalizer()
    h = norm.inner(expr)
    poly = []
    terms = []
    for (k, brs), c in h.terms:
        if not brs:
            poly.append(((k, brs), c))
            continue
        if not c.is_integer():
            raise UnsupportedPattern(
                f"coefficient {c} on a bracket term must be an integer")
        if k == 0 and len(brs) == 1:
            q = brs[0].inner
        else:
            q = GPExpr([((k, brs), ExactScalar(1))])
        if not is_simple(q):
            raise UnsupportedPattern(f"{to_text(q)} is not a simple product")
        terms.append((int(c.rational()), q))
    return SGPForm(tuple(terms), GPExpr(poly)), ConstraintSet.build(norm.conds)
