# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the loops in _pykernels (same signatures)."""

from libc.stdint cimport int64_t, uint64_t

cdef extern from *:
    bint __builtin_add_overflow(int64_t a, int64_t b, int64_t *res) nogil
    bint __builtin_mul_overflow(int64_t a, int64_t b, int64_t *res) nogil

cdef int64_t LIMIT = 4611686018427387904  # 2**62


def subset_sums(gens):
    cdef Py_ssize_t L = len(gens)
    cdef Py_ssize_t size = (<Py_ssize_t>1) << L
    cdef int64_t[:] g
    cdef Py_ssize_t mask, low, idx
    cdef int64_t a, b, r
    import array
    g = array.array("q", gens)
    out = array.array("q", bytes(8 * size))
    cdef int64_t[:] s = out
    for mask in range(1, size):
        low = mask & -mask
        idx = 0
        while (low >> idx) != 1:
            idx += 1
        a = s[mask ^ low]
        b = g[idx]
        if __builtin_add_overflow(a, b, &r):
            raise OverflowError("subset sum exceeds int64")
        s[mask] = r
    return out.tolist()




def monomial_window_scan(c_frac, width, int power, int64_t n_lo, int64_t n_hi, d_lo, d_hi):
    cdef uint64_t c = <uint64_t>(c_frac & 0xFFFFFFFFFFFFFFFF)
    cdef int64_t w = width if width < LIMIT else LIMIT
    cdef int64_t dl = d_lo
    cdef uint64_t dh = <uint64_t>d_hi
    cdef Py_ssize_t count = n_hi - n_lo + 1
    out = bytearray(count)
    cdef unsigned char[:] o = out
    cdef Py_ssize_t i
    cdef int64_t n, nk, mag, err
    cdef int j
    cdef bint bad
    cdef uint64_t s
    cdef int64_t signed_s
    for i in range(count):
        n = n_lo + i
        nk = 1
        bad = False
        for j in range(power):
            if __builtin_mul_overflow(nk, n, &nk):
                bad = True
                break
        if bad:
            o[i] = 2
            continue
        mag = -nk if nk < 0 else nk
        if mag >= LIMIT or __builtin_mul_overflow(mag, w, &err) or err >= LIMIT:
            o[i] = 2
            continue
        s = c * <uint64_t>nk
        if nk < 0:
            s -= <uint64_t>err
        signed_s = <int64_t>s
        if signed_s > -dl and signed_s < dl - err:
            o[i] = 1
        elif s >= dh and s <= (<uint64_t>0) - dh - <uint64_t>err:
            o[i] = 0
        else:
            o[i] = 2
    return out
