"""Command-line front end: ``gpolylab <command> [options]``.

Exit codes: 0 success, 1 search found nothing, 2 input or math error,
64 usage error, 75 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from typing import Any, Optional, Sequence

from . import __version__
from .constraints import (BudgetExceeded, ConstraintSet, NotFound, c_enumerate,
                          c_intersect, c_membership, ip_intersection_witness)
from .dynsim import (BoxRegion, SystemDescriptor, descending_refine, fs_witness_in_set,
                     hitting_set, return_set, rotation, skew, vdw_search)
from .gpeval import eval_trace
from .gpexpr import GPExpr, parse, parse_scalar, to_text
from .gpstruct import (derivative, equivalent, good, leading_sum, nondegenerate,
                       pet_compare, weight_vector)
from .ipsets import (cell_refine, divisible_refine, fs_enumerate, image_additivity_check,
                     scale_members, spectra_div)
from .scalar import ExactScalar
from .sgp import to_sgp_normal

EXIT_OK, EXIT_NOT_FOUND, EXIT_ERROR, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 64, 75

GLOBAL_DEFAULTS = {"format": "json", "seed": 0, "jobs": 1, "dry_run": False,
                   "config": None, "manifest_out": None}
CONFIG_KEYS = {"format", "seed", "jobs", "precision_cap"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# value conversion

def jsonable(v: Any) -> Any:
    if isinstance(v, ExactScalar):
        return int(v.rational()) if v.is_integer() else str(v)
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else str(v)
    if isinstance(v, GPExpr):
        return to_text(v)
    if hasattr(v, "to_json"):
        return jsonable(v.to_json())
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    return v


def _gens(text: str) -> list:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"generators must be comma-separated integers: {text!r}")


def _ints(text: str) -> list:
    return _gens(text)


def _system(text: str) -> SystemDescriptor:
    kind, _, alpha = text.partition(":")
    if not alpha:
        raise UsageError("system must look like rotation:sqrt(2) or skew2:sqrt(2)")
    a = parse_scalar(alpha)
    if kind == "rotation":
        return rotation(a)
    if kind.startswith("skew") and kind[4:].isdigit():
        return skew(a, int(kind[4:]))
    raise UsageError(f"unknown system {kind!r}")


def _box(text: str) -> BoxRegion:
    arcs = []
    for part in text.split(","):
        c, _, r = part.partition(":")
        if not r:
            raise UsageError(f"box arcs look like center:radius, got {part!r}")
        arcs.append((Fraction(c), Fraction(r)))
    return BoxRegion(tuple(arcs))


def _point(text: str) -> tuple:
    return tuple(Fraction(t) for t in text.split(","))


def _cset(conds) -> ConstraintSet:
    return ConstraintSet(tuple((parse(e), Fraction(d)) for e, d in conds or ()))


# ---------------------------------------------------------------------------
# handlers return JSON-able payloads

def cmd_eval(a):
    if a.precision:
        os.environ["GPOLYLAB_PRECISION_CAP"] = str(a.precision)
    value, trace = eval_trace(parse(a.expr), a.n)
    if a.trace:
        return {"value": value, "frac_trace": trace}
    return value


def cmd_a(a):
    return leading_sum(parse(a.expr))


def cmd_degree(a):
    return parse(a.expr).degree()


def cmd_equiv(a):
    return equivalent(parse(a.p), parse(a.q))


def cmd_weight(a):
    return weight_vector(parse(p) for p in a.poly)


def cmd_pet_cmp(a):
    return pet_compare(_ints(a.a), _ints(a.b))


def cmd_derive(a):
    r = derivative(parse(a.expr), a.m, delta=a.delta, strict=not a.no_strict)
    return r


def cmd_good(a):
    return good(a.m, parse(a.expr))


def cmd_nondegenerate(a):
    return nondegenerate([parse(p) for p in a.poly])


def cmd_normal(a):
    h, C = to_sgp_normal(parse(a.expr))
    return {"form": h, "expr": h.to_expr(), "constraints": C}


def cmd_fs(a):
    g = _gens(a.gens)
    if a.action == "enum":
        return fs_enumerate(g, a.depth if a.depth is not None else len(g), budget=a.budget)
    if a.action == "refine":
        if a.m is not None:
            return divisible_refine(g, a.m, a.count)
        spec = {"alpha": [parse_scalar(x) for x in a.alpha or ()],
                "b": [parse_scalar(x) for x in a.b or ()],
                "beta": [parse_scalar(x) for x in a.beta or ()],
                "c": [parse_scalar(x) for x in a.c or ()]}
        return cell_refine(g, spec, Fraction(a.eps), a.k, budget=a.budget)
    if a.action == "spectra":
        return spectra_div(g, a.q)
    if a.action == "scale":
        return scale_members(fs_enumerate(g, a.depth if a.depth is not None else len(g)), a.q)
    if a.action == "image-check":
        return image_additivity_check(parse(a.expr), g, a.depth if a.depth is not None else len(g))
    raise UsageError(a.action)


def cmd_cset(a):
    C = _cset(a.cond)
    if a.action == "member":
        return c_membership(a.n, C)
    if a.action == "enum":
        return c_enumerate(C, a.lo, a.hi, jobs=a.jobs)
    if a.action == "intersect":
        return c_intersect(C, _cset(a.other))
    if a.action == "ip-witness":
        return ip_intersection_witness(C, _gens(a.gens), budget=a.budget)
    raise UsageError(a.action)


def cmd_sim(a):
    s = _system(a.system)
    polys = [parse(p) for p in a.poly or ()]
    targets = [_box(t) for t in a.target or ()]
    if a.action == "return":
        x = _point(a.x) if a.x else (0,) * s.dim
        return return_set(s, x, Fraction(a.eps), a.N)
    if a.action == "hit":
        U = _box(a.box) if a.box else BoxRegion.full(s.dim)
        return hitting_set(s, U, targets, polys, a.N, a.grid)
    if a.action == "vdw":
        x, n = vdw_search(s, polys, Fraction(a.eps), a.N, a.grid)
        return {"x": list(x), "n": n}
    if a.action == "descend":
        return descending_refine(s, polys, targets, _gens(a.gens), _ints(a.r or "0"),
                                 a.depth, budget=a.budget, grid=a.grid)
    if a.action == "ip-witness":
        x = _point(a.x) if a.x else (0,) * s.dim
        members = return_set(s, x, Fraction(a.eps), a.N)
        return fs_witness_in_set(members, a.k, budget=a.budget)
    raise UsageError(a.action)


# ---------------------------------------------------------------------------
# parser

def _globals(parser, suppress: bool):
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--format", choices=["json", "table", "csv"], default=d)
    parser.add_argument("--seed", type=int, default=d,
                        help="seed recorded in manifests; searches here are deterministic")
    parser.add_argument("--jobs", type=int, default=d, help="worker processes for range scans")
    parser.add_argument("--dry-run", action="store_true", default=d,
                        help="validate inputs without computing")
    parser.add_argument("--config", default=d, help="key = value file with defaults")
    parser.add_argument("--manifest-out", default=d, help="write a replayable manifest here")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gpolylab", description="Generalized polynomial toolkit")
    p.add_argument("--version", action="version", version=f"gpolylab {__version__}")
    _globals(p, suppress=True)
    common = _Parser(add_help=False)
    _globals(common, suppress=True)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    sp = add("eval", cmd_eval, "evaluate at an integer")
    sp.add_argument("--expr", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--trace", action="store_true")
    sp.add_argument("--precision", type=int, help="bit cap for sign decisions")
    add("a", cmd_a, "leading-coefficient sum A(p)").add_argument("--expr", required=True)
    add("degree", cmd_degree, "formal degree").add_argument("--expr", required=True)
    sp = add("equiv", cmd_equiv, "equivalence p ~ q")
    sp.add_argument("--p", required=True)
    sp.add_argument("--q", required=True)
    add("weight", cmd_weight, "weight vector of a system").add_argument(
        "--poly", action="append", default=[])
    sp = add("pet-cmp", cmd_pet_cmp, "compare weight vectors")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp = add("derive", cmd_derive, "derivative D(p, m)")
    sp.add_argument("--expr", required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--delta", type=Fraction)
    sp.add_argument("--no-strict", action="store_true")
    sp = add("good", cmd_good, "is m good for p")
    sp.add_argument("--expr", required=True)
    sp.add_argument("--m", type=int, required=True)
    add("nondegenerate", cmd_nondegenerate, "non-degeneracy of a tuple").add_argument(
        "--poly", action="append", default=[])
    add("normal", cmd_normal, "normal form and its constraint set").add_argument(
        "--expr", required=True)

    sp = add("fs", cmd_fs, "finite sums")
    sp.add_argument("action", choices=["enum", "refine", "spectra", "scale", "image-check"])
    sp.add_argument("--gens", required=True)
    sp.add_argument("--depth", type=int)
    sp.add_argument("--m", type=int, help="divisibility modulus for refine")
    sp.add_argument("--count", type=int)
    sp.add_argument("--alpha", action="append")
    sp.add_argument("--b", action="append")
    sp.add_argument("--beta", action="append")
    sp.add_argument("--c", action="append")
    sp.add_argument("--eps", default="1/10")
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--q", type=int)
    sp.add_argument("--expr")
    sp.add_argument("--budget", type=int, default=1 << 16)

    sp = add("cset", cmd_cset, "constraint sets")
    sp.add_argument("action", choices=["member", "enum", "intersect", "ip-witness"])
    sp.add_argument("--cond", nargs=2, action="append", metavar=("EXPR", "DELTA"))
    sp.add_argument("--other", nargs=2, action="append", metavar=("EXPR", "DELTA"))
    sp.add_argument("--n", type=int, default=0)
    sp.add_argument("--lo", type=int, default=1)
    sp.add_argument("--hi", type=int, default=100)
    sp.add_argument("--gens", default="1")
    sp.add_argument("--budget", type=int, default=1 << 16)

    sp = add("sim", cmd_sim, "dynamical-system searches")
    sp.add_argument("action", choices=["return", "hit", "vdw", "descend", "ip-witness"])
    sp.add_argument("--system", required=True)
    sp.add_argument("--x")
    sp.add_argument("--eps", default="1/10")
    sp.add_argument("--N", type=int, default=1000)
    sp.add_argument("--box")
    sp.add_argument("--target", action="append")
    sp.add_argument("--poly", action="append")
    sp.add_argument("--grid", type=int, default=8)
    sp.add_argument("--gens", default="1")
    sp.add_argument("--r")
    sp.add_argument("--depth", type=int, default=3)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--budget", type=int, default=1 << 12)

    sp = sub.add_parser("replay", help="rerun a saved manifest")
    sp.add_argument("manifest")
    sp.set_defaults(func=None)
    return p


# ---------------------------------------------------------------------------
# output

def render(value: Any, fmt: str) -> str:
    value = jsonable(value)
    if fmt == "json":
        return json.dumps(value, sort_keys=True, separators=(",", ":"))
    if fmt == "table":
        if isinstance(value, dict):
            w = max((len(k) for k in value), default=0)
            return "\n".join(f"{k.ljust(w)}  {json.dumps(value[k], sort_keys=True)}"
                             for k in sorted(value))
        if isinstance(value, list):
            return "\n".join(json.dumps(v, sort_keys=True) for v in value)
        return str(value)
    rows = value
    if isinstance(value, dict):
        lists = [k for k in sorted(value) if isinstance(value[k], list)]
        rows = value[lists[0]] if lists else [value]
    if not isinstance(rows, list):
        rows = [rows]
    buf = io.StringIO()
    if rows and all(isinstance(r, dict) for r in rows):
        keys = sorted({k for r in rows for k in r})
        wr = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        wr.writeheader()
        for r in rows:
            wr.writerow({k: json.dumps(r[k]) if isinstance(r.get(k), (list, dict)) else r.get(k)
                         for k in keys})
    else:
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["value"])
        for r in rows:
            wr.writerow([json.dumps(r) if isinstance(r, (list, dict)) else r])
    return buf.getvalue().rstrip("\n")


def read_config(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or key not in CONFIG_KEYS:
                raise UsageError(f"{path}:{lineno}: expected one of {sorted(CONFIG_KEYS)} = value")
            val = val.strip()
            out[key] = int(val) if key in {"seed", "jobs", "precision_cap"} else val
    return out


def _strip_meta(argv: Sequence[str]) -> list:
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
            continue
        if tok in ("--manifest-out", "--config"):
            skip = True
            continue
        if tok.startswith(("--manifest-out=", "--config=")):
            continue
        out.append(tok)
    return out


def _resolve(ns: argparse.Namespace) -> argparse.Namespace:
    for k, v in GLOBAL_DEFAULTS.items():
        if not hasattr(ns, k):
            setattr(ns, k, v)
    if ns.config:
        cfg = read_config(ns.config)
        for k, v in cfg.items():
            if k == "precision_cap":
                os.environ["GPOLYLAB_PRECISION_CAP"] = str(v)
            elif getattr(ns, k) == GLOBAL_DEFAULTS[k]:
                setattr(ns, k, v)
    return ns


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    err = err or sys.stderr
    ns = None
    try:
        ns = _resolve(build_parser().parse_args(argv))
        if ns.command == "replay":
            with open(ns.manifest) as fh:
                manifest = json.load(fh)
            if manifest.get("precision_cap"):
                os.environ["GPOLYLAB_PRECISION_CAP"] = str(manifest["precision_cap"])
            return run(manifest["argv"], out, err)
        if ns.manifest_out:
            manifest = {
                "argv": _strip_meta(argv),
                "command": ns.command,
                "seed": ns.seed,
                "format": ns.format,
                "precision_cap": os.environ.get("GPOLYLAB_PRECISION_CAP"),
                "version": __version__,
            }
            with open(ns.manifest_out, "w") as fh:
                json.dump(manifest, fh, sort_keys=True, indent=2)
                fh.write("\n")
        if ns.dry_run:
            _validate(ns)
            print(render({"command": ns.command, "dry_run": True, "valid": True}, ns.format),
                  file=out)
            return EXIT_OK
        result = ns.func(ns)
        print(render(result, ns.format), file=out)
        return EXIT_OK
    except UsageError as e:
        print(str(e), file=err)
        return EXIT_USAGE
    except NotFound as e:
        print(render({"status": "not_found", "message": str(e)}, getattr(ns, "format", "json")),
              file=out)
        return EXIT_NOT_FOUND
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=err)
        return EXIT_BUDGET
    except (ValueError, ArithmeticError, AssertionError, KeyError, IndexError, OSError) as e:
        print(f"error: {type(e).__name__}: {e}", file=err)
        return EXIT_ERROR


def _validate(ns) -> None:
    """Parse every structured input without computing anything."""
    for name in ("expr", "p", "q"):
        if getattr(ns, name, None):
            parse(getattr(ns, name))
    for name in ("poly",):
        for p in getattr(ns, name, None) or ():
            parse(p)
    for name in ("cond", "other"):
        _cset(getattr(ns, name, None))
    if getattr(ns, "system", None):
        _system(ns.system)
    for t in getattr(ns, "target", None) or ():
        _box(t)
    if getattr(ns, "box", None):
        _box(ns.box)
    if getattr(ns, "gens", None):
        _gens(ns.gens)
    for name in ("a", "b"):
        v = getattr(ns, name, None)
        if isinstance(v, str):
            _ints(v)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
