import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpolylab import _kernels
from gpolylab._kernels import python_impl

compiled = _kernels.compiled_impl
needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled extension not built")


def test_backend_name():
    assert _kernels.BACKEND in ("compiled", "python")


def test_python_subset_sums():
    assert python_impl.subset_sums([1, 2, 4]) == list(range(8))
    assert python_impl.subset_sums([]) == [0]


@needs_compiled
@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-10**12, 10**12), max_size=12))
def test_subset_sums_parity(gens):
    assert list(compiled.subset_sums(gens)) == python_impl.subset_sums(gens)


@needs_compiled
def test_subset_sums_overflow_is_reported():
    with pytest.raises(OverflowError):
        compiled.subset_sums([2**62, 2**62])


def test_ipsets_fall_back_on_overflow():
    from gpolylab.ipsets import fs_enumerate
    big = 2**62
    assert fs_enumerate((big, big), 2).sums == (0, big, big, 2 * big)


@needs_compiled
@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**64 - 1), st.integers(0, 2**10), st.integers(1, 4),
       st.integers(-3000, 0), st.integers(0, 3000), st.integers(1, 2**63 - 1))
def test_window_scan_parity(c, width, power, lo, span, d):
    args = (c, width, power, lo, lo + span % 500, d, d + 1)
    assert bytes(compiled.monomial_window_scan(*args)) == bytes(python_impl.monomial_window_scan(*args))


def test_window_scan_is_sound():
    # c = 1/8 exactly, delta = 1/4: {n/8} in (-1/4, 1/4) iff n mod 8 in {7, 0, 1}
    one = 1 << 64
    out = _kernels.monomial_window_scan(one // 8, 0, 1, 0, 15, one // 4, one // 4)
    for n, s in enumerate(out):
        if s != _kernels.UNDECIDED:
            assert (s == _kernels.INSIDE) == (n % 8 in (7, 0, 1))
