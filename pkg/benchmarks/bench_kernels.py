"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import math
import timeit
from fractions import Fraction

from gpolylab import _kernels
from gpolylab._kernels import _pykernels
from gpolylab.scalar import ExactScalar


def scan_args(n_range: int, power: int):
    c = ExactScalar.sqrt(2)
    lo, hi = c.enclosure(64)
    one = 1 << 64
    delta = Fraction(1, 10)
    return (lo % one, hi - lo, power, -n_range, n_range,
            math.floor(delta * one), math.ceil(delta * one))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    compiled = _kernels.compiled_impl
    if compiled is None:
        print("compiled kernels unavailable; only the Python fallback can run")
    cases = [
        ("subset_sums depth 16", "subset_sums", (list(range(1, 17)),)),
        ("subset_sums depth 20", "subset_sums", (list(range(1, 21)),)),
        ("window scan k=2, 2e5 points", "monomial_window_scan", scan_args(100_000, 2)),
        ("window scan k=3, 2e5 points", "monomial_window_scan", scan_args(100_000, 3)),
    ]
    print(f"{'case':32} {'python (s)':>12} {'compiled (s)':>13} {'speedup':>8}")
    for label, name, fargs in cases:
        py = getattr(_pykernels, name)
        t_py = min(timeit.repeat(lambda: py(*fargs), number=1, repeat=args.repeat))
        if compiled is None:
            print(f"{label:32} {t_py:12.4f} {'-':>13} {'-':>8}")
            continue
        fn = getattr(compiled, name)
        assert bytes(fn(*fargs)) == bytes(py(*fargs)) if name != "subset_sums" \
            else list(fn(*fargs)) == py(*fargs)
        t_c = min(timeit.repeat(lambda: fn(*fargs), number=1, repeat=args.repeat))
        print(f"{label:32} {t_py:12.4f} {t_c:13.4f} {t_py / t_c:7.1f}x")


if __name__ == "__main__":
    main()
