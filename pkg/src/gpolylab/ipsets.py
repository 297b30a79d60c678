"""Finite sums of generator sequences and the refinements built on them.

An IP-set is represented by a finite prefix of generators; every statement
here is about a fixed depth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from . import _kernels
from .constraints import BudgetExceeded, NotFound, frac_in_window
from .gpeval import eval_int, nearest_int
from .gpexpr import FiniteIndexSet, as_expr
from .scalar import ExactScalar, as_scalar

__all__ = [
    "FSGenerators",
    "FSSet",
    "InsufficientGenerators",
    "fs_enumerate",
    "n_alpha",
    "sub_ip_excluding",
    "divisible_refine",
    "cell_refine",
    "image_additivity_check",
    "spectra_div",
    "scale_members",
]

DEFAULT_FS_BUDGET = 1 << 22


class InsufficientGenerators(ValueError):
    pass


@dataclass(frozen=True)
class FSGenerators:
    values: tuple
    supports: Optional[tuple] = field(default=None, compare=False)

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        if any(v == 0 for v in vals):
            raise ValueError("generators must be nonzero")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def to_json(self) -> dict:
        out = {"gens": list(self.values)}
        if self.supports is not None:
            out["supports"] = [list(s) for s in self.supports]
        return out


def _gens(g) -> FSGenerators:
    return g if isinstance(g, FSGenerators) else FSGenerators(tuple(g))


def _subset_sums(values) -> list:
    try:
        return _kernels.subset_sums(list(values))
    except OverflowError:
        return _kernels.python_impl.subset_sums(list(values))


@dataclass(frozen=True)
class FSSet:
    """All n_alpha for alpha inside {1..depth}, indexed by bitmask."""

    gens: FSGenerators
    depth: int
    sums: tuple
    degenerate: bool = False

    @staticmethod
    def _alpha(mask: int) -> FiniteIndexSet:
        return FiniteIndexSet(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)

    def __getitem__(self, alpha) -> int:
        mask = 0
        for i in alpha:
            if not 1 <= i <= self.depth:
                raise KeyError(alpha)
            mask |= 1 << (i - 1)
        if not mask:
            raise KeyError(alpha)
        return self.sums[mask]

    def items(self) -> Iterator[tuple[FiniteIndexSet, int]]:
        for mask in range(1, len(self.sums)):
            yield self._alpha(mask), self.sums[mask]

    def __len__(self):
        return len(self.sums) - 1

    @property
    def values(self) -> list:
        return sorted(set(self.sums[1:]))

    def to_json(self) -> dict:
        out = {
            "gens": list(self.gens.values[: self.depth]),
            "depth": self.depth,
            "values": self.values,
            "members": [{"alpha": list(a), "n": v} for a, v in self.items()],
        }
        if self.degenerate:
            out["degenerate"] = True
        return out


def fs_enumerate(g, depth: int, budget: int = DEFAULT_FS_BUDGET) -> FSSet:
    g = _gens(g)
    if not 0 <= depth <= len(g):
        raise ValueError(f"depth {depth} outside 0..{len(g)}")
    if (1 << depth) > budget:
        raise BudgetExceeded(f"2^{depth} finite sums exceed budget {budget}")
    return FSSet(g, depth, tuple(_subset_sums(g.values[:depth])))


def n_alpha(g, alpha) -> int:
    g = _gens(g)
    alpha = FiniteIndexSet(alpha)
    if alpha[-1] > len(g):
        raise IndexError(f"index {alpha[-1]} beyond {len(g)} generators")
    return sum(g.values[i - 1] for i in alpha)


def sub_ip_excluding(g, used: Iterable) -> FSGenerators:
    g = _gens(g)
    banned = {i for alpha in used for i in alpha}
    return FSGenerators(tuple(v for i, v in enumerate(g.values, 1) if i not in banned))


def divisible_refine(g, m: int, count: Optional[int] = None) -> FSGenerators:
    """Sums of disjoint consecutive blocks, each divisible by m.

    Scans left to right; within each run the first repeated prefix residue
    closes a block.  ``count`` asks for at least that many blocks.
    """
    g = _gens(g)
    if m == 0:
        raise ValueError("m must be nonzero")
    out, supports = [], []
    seen = {0: 0}
    total = 0
    for j, v in enumerate(g.values, 1):
        total += v
        r = total % m
        if r in seen:
            lo = seen[r]
            block = tuple(range(lo + 1, j + 1))
            s = sum(g.values[lo:j])
            if s != 0:
                out.append(s)
                supports.append(block)
                if count is not None and len(out) == count:
                    break
            seen = {0: j}
            total = 0
        else:
            seen[r] = j
    if not out or (count is not None and len(out) < count):
        want = count or 1
        raise InsufficientGenerators(
            f"{len(g)} generators gave {len(out)} blocks divisible by {m}, wanted {want}")
    return FSGenerators(tuple(out), tuple(supports))


def _half_open_cell(v: ExactScalar, half_width: Fraction) -> bool:
    # {v} in (-h, h]
    f = v - nearest_int(v)
    return (f + half_width).sign() > 0 and (f - half_width).sign() <= 0


def _pairs(spec: Optional[dict]) -> list:
    if not spec:
        return []
    pairs = []
    for coef_key, arg_key in (("b", "alpha"), ("c", "beta")):
        args = [as_scalar(a) for a in spec.get(arg_key, ())]
        coefs = [as_scalar(c) for c in spec.get(coef_key, ())] or [ExactScalar(1)] * len(args)
        if len(coefs) != len(args):
            raise ValueError(f"{coef_key} and {arg_key} lengths differ")
        pairs.extend(zip(coefs, args))
    return pairs


def _fracs(pairs, n: int) -> list:
    out = []
    for b, a in pairs:
        x = a * n
        out.append(x)
        out.append(b * nearest_int(x))
    return out


def _reachable(values: Sequence[int], avail: Sequence[int], budget: int) -> dict:
    reach = {0: ()}
    for i in avail:
        v = values[i - 1]
        for s, sup in list(reach.items()):
            t = s + v
            if t not in reach:
                reach[t] = sup + (i,)
        if len(reach) > budget:
            raise BudgetExceeded("finite-sum value table outgrew the budget")
    del reach[0]
    return reach


def cell_refine(g, spec: Optional[dict], eps, k: int, budget: int = 1 << 16) -> FSGenerators:
    """k finite sums with disjoint supports whose finite sums all stay in the windows.

    Windows are ``{alpha n}, {b ni(alpha n)}`` (and the same for ``beta, c``)
    in ``(-eps, eps)``.  Candidates come from the cell around 0 of width
    1/(2m), m > 2 the least with 1/(2m) < eps, and are tried in increasing
    magnitude by depth-first search.
    """
    g = _gens(g)
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 2):
        raise ValueError("eps must lie in (0, 1/2)")
    if k < 1:
        raise ValueError("k must be positive")
    pairs = _pairs(spec)
    if not pairs:
        if len(g) < k:
            raise NotFound("fewer generators than requested")
        return FSGenerators(g.values[:k], tuple((i,) for i in range(1, k + 1)))
    m = max(3, int(1 / (2 * eps)) + 1)
    cell = Fraction(1, 2 * m)
    steps = 0

    def ok(n: int) -> bool:
        return all(frac_in_window(x, eps) for x in _fracs(pairs, n))

    def in_cell(n: int) -> bool:
        return all(_half_open_cell(x, cell) for x in _fracs(pairs, n))

    cell_cache: dict = {}

    def search(chosen, supports, sums, avail):
        nonlocal steps
        if len(chosen) == k:
            return chosen, supports
        reach = _reachable(g.values, avail, budget)
        for v in sorted(reach, key=lambda x: (abs(x), x)):
            if v not in cell_cache:
                cell_cache[v] = in_cell(v)
            if not cell_cache[v]:
                continue
            steps += 1
            if steps > budget:
                raise NotFound(f"no refinement within budget {budget}")
            new = [v] + [s + v for s in sums]
            if not all(ok(x) for x in new):
                continue
            sup = reach[v]
            found = search(chosen + [v], supports + [sup], sums + new,
                           [i for i in avail if i not in sup])
            if found:
                return found
        return None

    found = search([], [], [], list(range(1, len(g) + 1)))
    if not found:
        raise NotFound("search space exhausted")
    vals, sups = found
    return FSGenerators(tuple(vals), tuple(FiniteIndexSet(s) for s in sups))


def image_additivity_check(p, g, depth: int) -> bool:
    """p(n_alpha) = sum of p(n_i) over alpha, for every alpha in {1..depth}."""
    p = as_expr(p)
    g = _gens(g)
    if depth > len(g):
        raise ValueError("depth exceeds the generator count")
    images = [eval_int(p, v) for v in g.values[:depth]]
    fs = fs_enumerate(g, depth)
    img_sums = _subset_sums(images)
    return all(eval_int(p, fs.sums[mask]) == img_sums[mask] for mask in range(1, len(fs.sums)))


def spectra_div(g, q: int) -> FSGenerators:
    g = _gens(g)
    if q == 0:
        raise ValueError("q must be nonzero")
    bad = [v for v in g.values if v % q]
    if bad:
        raise ValueError(f"generators {bad} are not divisible by {q}; refine first")
    return FSGenerators(tuple(v // q for v in g.values))


def scale_members(s: FSSet, q: int) -> FSSet:
    """Every n_alpha times q; q = 0 gives the flagged all-zero set."""
    if q == 0:
        return FSSet(s.gens, s.depth, tuple(0 for _ in s.sums), degenerate=True)
    return FSSet(FSGenerators(tuple(q * v for v in s.gens.values)), s.depth,
                 tuple(q * v for v in s.sums))
