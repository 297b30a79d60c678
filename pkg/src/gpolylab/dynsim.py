"""Torus rotations and skew products: return sets, hitting sets, searches.

Orbit coordinates are integer combinations of the starting coordinates and
alpha, so every region test is exact.  A 128-bit fixed-point screen decides
most tests and the exact scalar comparison handles the rest.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb, factorial
from typing import Callable, Optional, Sequence

from .constraints import NotFound, frac_in_window
from .gpeval import eval_int, floor_int, nearest_int
from .gpexpr import FiniteIndexSet, as_expr
from .ipsets import FSGenerators
from .scalar import ExactScalar, as_scalar, scalar_sum

__all__ = [
    "SystemDescriptor",
    "BoxRegion",
    "rotation",
    "skew",
    "orbit_point",
    "step",
    "distance",
    "return_set",
    "hitting_set",
    "vdw_search",
    "descending_refine",
    "DescendResult",
    "fs_witness_in_set",
]

HALF = Fraction(1, 2)
PREC = 128
ONE = 1 << PREC


@dataclass(frozen=True)
class SystemDescriptor:
    """rotation (dim 1) or skew of dimension >= 2.

    ``skew`` with dim 2 is the affine twist (x + a, y + 2x + a); higher
    dimensions use (x1 + a, x2 + x1, ..., xd + x_{d-1}).
    """

    kind: str
    alpha: ExactScalar
    dim: int = 1

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_scalar(self.alpha))
        if self.kind == "rotation":
            if self.dim != 1:
                raise ValueError("a rotation acts on the circle")
        elif self.kind == "skew":
            if self.dim < 2:
                raise ValueError("a skew product needs dimension >= 2")
        else:
            raise ValueError(f"unknown system kind {self.kind!r}")

    def __str__(self):
        if self.kind == "rotation":
            return f"rotation:{self.alpha}"
        return f"skew{self.dim}:{self.alpha}"

    def to_json(self) -> dict:
        return {"kind": self.kind, "alpha": str(self.alpha), "dim": self.dim}


def rotation(alpha) -> SystemDescriptor:
    return SystemDescriptor("rotation", as_scalar(alpha), 1)


def skew(alpha, dim: int = 2) -> SystemDescriptor:
    return SystemDescriptor("skew", as_scalar(alpha), dim)


def _binom(k: int, j: int) -> int:
    if k >= 0:
        return comb(k, j)
    num = 1
    for t in range(j):
        num *= k - t
    return num // factorial(j)


def _coeffs(s: SystemDescriptor, k: int) -> list:
    """Per coordinate: (integer coefficients on x, coefficient on alpha)."""
    if s.kind == "rotation":
        return [((1,), k)]
    if s.dim == 2:
        return [((1, 0), k), ((2 * k, 1), k * k)]
    out = []
    for i in range(s.dim):
        cx = tuple(_binom(k, i - j) if j <= i else 0 for j in range(s.dim))
        out.append((cx, _binom(k, i + 1)))
    return out


def _mod1(v: ExactScalar) -> ExactScalar:
    return v - floor_int(v)


def _point(x, dim: int) -> tuple:
    if not isinstance(x, (tuple, list)):
        x = (x,)
    if len(x) != dim:
        raise ValueError(f"point needs {dim} coordinates")
    return tuple(as_scalar(c) for c in x)


def orbit_point(s: SystemDescriptor, x, n: int) -> tuple:
    """T^n x, each coordinate reduced into [0, 1)."""
    x = _point(x, s.dim)
    out = []
    for cx, ca in _coeffs(s, n):
        v = scalar_sum([c * xi for c, xi in zip(cx, x) if c] + [s.alpha * ca])
        out.append(_mod1(v))
    return tuple(out)


def step(s: SystemDescriptor, x) -> tuple:
    """One application of T by its defining formula."""
    x = _point(x, s.dim)
    a = s.alpha
    if s.kind == "rotation":
        y = (x[0] + a,)
    elif s.dim == 2:
        y = (x[0] + a, x[1] + 2 * x[0] + a)
    else:
        y = (x[0] + a,) + tuple(x[i] + x[i - 1] for i in range(1, s.dim))
    return tuple(_mod1(v) for v in y)


def distance(x, y) -> ExactScalar:
    """Max over coordinates of circle distance."""
    best = ExactScalar(0)
    for a, b in zip(x, y):
        d = as_scalar(a) - as_scalar(b)
        d = abs(d - nearest_int(d))
        if d > best:
            best = d
    return best


@dataclass(frozen=True)
class BoxRegion:
    """Product of open arcs (center, radius); radius >= 1/2 is the whole circle."""

    arcs: tuple

    def __post_init__(self):
        arcs = []
        for c, r in self.arcs:
            c, r = Fraction(c) % 1, Fraction(r)
            if r <= 0:
                raise ValueError("radius must be positive")
            arcs.append((c, min(r, HALF)))
        object.__setattr__(self, "arcs", tuple(arcs))

    @classmethod
    def full(cls, dim: int) -> "BoxRegion":
        return cls(tuple((0, HALF) for _ in range(dim)))

    @property
    def dim(self) -> int:
        return len(self.arcs)

    def is_full(self) -> bool:
        return all(r >= HALF for _, r in self.arcs)

    def contains(self, x) -> bool:
        return all(r >= HALF or frac_in_window(as_scalar(xi) - c, r)
                   for xi, (c, r) in zip(x, self.arcs))

    def grid(self, k: int) -> list:
        """k^dim points strictly inside the box, center-first order per axis."""
        axes = []
        for c, r in self.arcs:
            if r >= HALF:
                pts = [Fraction(i, k) for i in range(k)]
            else:
                pts = [(c + r * Fraction(2 * i + 1 - k, k)) % 1 for i in range(k)]
                pts.sort(key=lambda p: (abs(((p - c + HALF) % 1) - HALF), p))
            axes.append(pts)
        return [tuple(p) for p in product(*axes)]

    def subset_of(self, other: "BoxRegion") -> bool:
        for (c, r), (c2, r2) in zip(self.arcs, other.arcs):
            if r2 >= HALF:
                continue
            if r >= HALF:
                return False
            off = abs(((c - c2 + HALF) % 1) - HALF)
            if off + r > r2:
                return False
        return True

    def to_json(self) -> list:
        return [{"center": str(c), "radius": str(r)} for c, r in self.arcs]


# ---------------------------------------------------------------------------
# fixed-point screen

class _Screen:
    def __init__(self, s: SystemDescriptor):
        self.s = s
        lo, hi = s.alpha.enclosure(PREC)
        self.a_lo, self.a_w = lo, hi - lo

    @staticmethod
    def fixed(x: ExactScalar) -> tuple[int, int]:
        lo, hi = x.enclosure(PREC)
        return lo, hi - lo

    def in_arc(self, cx, ca, xf, xs, center: Fraction, radius: Fraction) -> bool:
        """Is {sum cx*x + ca*alpha - center} in (-radius, radius)?"""
        if radius >= HALF:
            return True
        v = ca * self.a_lo
        err = abs(ca) * self.a_w + 2
        for c, (lo, w) in zip(cx, xf):
            if c:
                v += c * lo
                err += abs(c) * w
        v -= (center.numerator * ONE) // center.denominator
        f = v % ONE
        if f >= ONE >> 1:
            f -= ONE
        af = abs(f)
        r_lo = (radius.numerator * ONE) // radius.denominator
        r_hi = r_lo + 1
        if af + err < r_lo:
            return True
        if af - err >= r_hi and (ONE >> 1) - err >= r_hi:
            return False
        exact = scalar_sum([c * xi for c, xi in zip(cx, xs) if c] + [self.s.alpha * ca])
        return frac_in_window(exact - center, radius)

    def lands_in(self, k: int, x, xf, box: BoxRegion) -> bool:
        for (cx, ca), (c, r) in zip(_coeffs(self.s, k), box.arcs):
            if not self.in_arc(cx, ca, xf, x, c, r):
                return False
        return True


def _prep(x) -> tuple:
    xs = tuple(as_scalar(c) for c in x)
    return xs, tuple(_Screen.fixed(c) for c in xs)


def _certify(s: SystemDescriptor, x, k: int, box: BoxRegion) -> bool:
    return box.contains(orbit_point(s, x, k))


# ---------------------------------------------------------------------------
# operations

def return_set(s: SystemDescriptor, x, eps, N: int) -> list:
    """{1 <= n <= N : rho(T^n x, x) < eps}."""
    eps = Fraction(eps)
    if not 0 < eps < HALF:
        raise ValueError("eps must lie in (0, 1/2)")
    x = _point(x, s.dim)
    screen = _Screen(s)
    xs, xf = _prep(x)
    out = []
    for n in range(1, N + 1):
        ok = True
        for i, (cx, ca) in enumerate(_coeffs(s, n)):
            # T^n x - x: subtract 1 from the diagonal coefficient
            cxd = tuple(c - (j == i) for j, c in enumerate(cx))
            if not screen.in_arc(cxd, ca, xf, xs, Fraction(0), eps):
                ok = False
                break
        if ok:
            out.append(n)
    return out


def _poly_values(polys, n: int) -> list:
    return [eval_int(p, n) for p in polys]


def hitting_set(s: SystemDescriptor, U: BoxRegion, targets: Sequence[BoxRegion],
                polys: Sequence, N: int, grid: int = 8) -> list:
    """n in [1, N] with a grid point x in U and T^{p_t(n)} x in V_t for all t.

    Members are certified; omissions only mean no grid point worked.
    """
    if grid < 8:
        raise ValueError("grid resolution must be at least 8 per coordinate")
    polys = [as_expr(p) for p in polys]
    if len(polys) != len(targets):
        raise ValueError("one target per polynomial")
    screen = _Screen(s)
    pts = [_prep(x) for x in U.grid(grid)]
    out = []
    for n in range(1, N + 1):
        ks = _poly_values(polys, n)
        for xs, xf in pts:
            if all(screen.lands_in(k, xs, xf, V) for k, V in zip(ks, targets)):
                if not all(_certify(s, xs, k, V) for k, V in zip(ks, targets)):
                    raise AssertionError(f"screen and exact orbit disagree at n = {n}")
                out.append(n)
                break
    return out


def vdw_search(s: SystemDescriptor, polys: Sequence, eps, N: int, grid: int = 8) -> tuple:
    """First (x, n), n-major then grid order, with rho(T^{p_t(n)} x, x) < eps for all t."""
    eps = Fraction(eps)
    if not 0 < eps < HALF:
        raise ValueError("eps must lie in (0, 1/2)")
    polys = [as_expr(p) for p in polys]
    screen = _Screen(s)
    pts = [_prep(x) for x in BoxRegion.full(s.dim).grid(grid)]
    for n in range(1, N + 1):
        ks = _poly_values(polys, n)
        for xs, xf in pts:
            good = True
            for k in ks:
                for i, (cx, ca) in enumerate(_coeffs(s, k)):
                    cxd = tuple(c - (j == i) for j, c in enumerate(cx))
                    if not screen.in_arc(cxd, ca, xf, xs, Fraction(0), eps):
                        good = False
                        break
                if not good:
                    break
            if good:
                if not all(distance(orbit_point(s, xs, k), xs) < eps for k in ks):
                    raise AssertionError(f"screen and exact orbit disagree at n = {n}")
                return xs, n
    raise NotFound(f"no recurrence within n <= {N}")


# ---------------------------------------------------------------------------
# descending sequences

def _lipschitz(s: SystemDescriptor, k: int) -> int:
    return max(sum(abs(c) for c in cx) for cx, _ in _coeffs(s, k))


def _margin(x, box: BoxRegion) -> Fraction:
    """A rational lower bound for how far x sits inside box (positive if inside)."""
    best = HALF
    for xi, (c, r) in zip(x, box.arcs):
        if r >= HALF:
            continue
        d = as_scalar(xi) - c
        d = abs(d - nearest_int(d))
        if d.is_rational():
            gap = r - d.rational()
        else:
            _, hi = d.enclosure(64)
            gap = r - Fraction(hi, 1 << 64)
        best = min(best, gap)
    return best


def _dyadic_below(q: Fraction) -> Fraction:
    j = 1
    while Fraction(1, 1 << j) >= q:
        j += 1
    return Fraction(1, 1 << j)


@dataclass(frozen=True)
class DescendResult:
    boxes: tuple        # boxes[n][i] = V_i^{(n)}
    alphas: tuple       # FiniteIndexSet per stage
    values: tuple       # n_alpha per stage

    def to_json(self) -> dict:
        return {
            "alphas": [list(a) for a in self.alphas],
            "values": list(self.values),
            "boxes": [[b.to_json() for b in stage] for stage in self.boxes],
        }


def _r_of(r: Sequence[int], x: int) -> int:
    if not r:
        return 0
    return r[x] if x < len(r) else r[-1]


def _refine_box(s, screen, prev: BoxRegion, V: BoxRegion, j: int, grid: int):
    """A box B inside prev with T^j B inside V, or None."""
    if V.is_full():
        return prev
    L = _lipschitz(s, j)
    for y in prev.grid(grid):
        xs, xf = _prep(y)
        if not screen.lands_in(j, xs, xf, V):
            continue
        m1 = _margin(y, prev)
        m2 = _margin(orbit_point(s, y, j), V)
        if m1 <= 0 or m2 <= 0:
            continue
        rad = _dyadic_below(min(m1, m2 / L))
        return BoxRegion(tuple((c, rad) for c in y))
    return None


def descending_refine(s: SystemDescriptor, polys: Sequence, targets: Sequence[BoxRegion],
                      g, r: Sequence[int], depth: int, budget: int = 1 << 12,
                      grid: int = 8) -> DescendResult:
    """Stages 0..depth of the descending-sequence construction.

    At stage n, alpha_n lies beyond alpha_{n-1} and satisfies the growth
    bound; each V_i^{(n)} is a box inside V_i^{(n-1)} mapped into V_i by
    T^{p_i(n_alpha_n) - n}.  Earlier stages stay valid since boxes only
    shrink.  Raises NotFound when the candidate budget runs out at a stage.
    """
    polys = [as_expr(p) for p in polys]
    if not targets or len(targets) != len(polys):
        raise ValueError("one non-empty target per polynomial")
    if any(b < a for a, b in zip(r, r[1:])):
        raise ValueError("r must be non-decreasing")
    g = g if isinstance(g, FSGenerators) else FSGenerators(tuple(g))
    screen = _Screen(s)
    prev = list(targets)
    stages, alphas, values = [], [], []
    start = 0
    last = None
    examined = 0
    for n in range(depth + 1):
        bound = _r_of(r, 0) if last is None else abs(last) + _r_of(r, abs(last))
        rest = g.values[start:]
        found = None
        # each distinct finite-sum value is tried once, by largest support index
        reach = {0: ()}
        for i, gi in enumerate(rest, 1):
            for base, sup in list(reach.items()):
                v = base + gi
                if v in reach:
                    continue
                reach[v] = sup + (i,)
                if abs(v) <= bound:
                    continue
                examined += 1
                if examined > budget:
                    raise NotFound(f"stage {n}: no admissible alpha within budget {budget}")
                ks = _poly_values(polys, v)
                boxes = []
                for k, V, P in zip(ks, targets, prev):
                    B = _refine_box(s, screen, P, V, k - n, grid)
                    if B is None:
                        break
                    boxes.append(B)
                if len(boxes) == len(targets):
                    found = (reach[v], v, boxes)
                    break
            if found is not None:
                break
        if found is None:
            raise NotFound(f"stage {n}: generators exhausted")
        sup, v, boxes = found
        alpha = FiniteIndexSet(start + i for i in sup)
        alphas.append(alpha)
        values.append(v)
        stages.append(tuple(boxes))
        prev = boxes
        start = alpha[-1]
        last = v
    return DescendResult(tuple(stages), tuple(alphas), tuple(values))


def fs_witness_in_set(members: Sequence[int], k: int, budget: int = 1 << 16) -> FSGenerators:
    """k values (repetition allowed) whose 2^k - 1 finite sums all lie in members."""
    if k < 1:
        raise ValueError("k must be positive")
    pool = sorted(set(members))
    mset = set(pool)
    steps = 0

    def search(chosen, sums, lo):
        nonlocal steps
        if len(chosen) == k:
            return chosen
        for idx in range(lo, len(pool)):
            v = pool[idx]
            steps += 1
            if steps > budget:
                raise NotFound(f"no witness within budget {budget}")
            new = [v] + [t + v for t in sums]
            if v != 0 and all(t in mset for t in new):
                got = search(chosen + [v], sums + new, idx)
                if got:
                    return got
        return None

    got = search([], [], 0)
    if not got:
        raise NotFound(f"no {k} generators with all finite sums in the set")
    return FSGenerators(tuple(got))
