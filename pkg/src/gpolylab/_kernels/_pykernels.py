"""Pure-Python reference implementations of the hot loops."""

from __future__ import annotations

MASK64 = (1 << 64) - 1
_HALF = 1 << 63

INSIDE, OUTSIDE, UNDECIDED = 1, 0, 2


def subset_sums(gens) -> list:
    """sums[mask] = sum of gens[i] over the set bits i of mask."""
    L = len(gens)
    sums = [0] * (1 << L)
    for mask in range(1, 1 << L):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] + gens[low.bit_length() - 1]
    return sums


def monomial_window_scan(c_frac, width, power, n_lo, n_hi, d_lo, d_hi) -> bytearray:
    """Classify {c * n^power} against the window (-delta, delta) for n in [n_lo, n_hi].

    ``c_frac`` is the low 64 bits of a lower bound for c * 2^64 and ``width``
    the enclosure width in the same units; ``d_lo <= delta * 2^64 <= d_hi``.
    Entries are INSIDE, OUTSIDE or UNDECIDED (caller falls back to exact).
    """
    out = bytearray(n_hi - n_lo + 1)
    limit = 1 << 62
    for i, n in enumerate(range(n_lo, n_hi + 1)):
        nk = n**power
        mag = -nk if nk < 0 else nk
        err = mag * width
        if mag >= limit or err >= limit:
            out[i] = UNDECIDED
            continue
        s = (c_frac * nk - (err if nk < 0 else 0)) & MASK64
        signed = s - (1 << 64) if s >= _HALF else s
        if signed > -d_lo and signed < d_lo - err:
            out[i] = INSIDE
        elif s >= d_hi and s <= (1 << 64) - d_hi - err:
            out[i] = OUTSIDE
        else:
            out[i] = UNDECIDED
    return out
