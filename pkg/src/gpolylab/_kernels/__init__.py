"""Hot loops: compiled extension when available, pure Python otherwise.

Set ``GPOLYLAB_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels as python_impl

if os.environ.get("GPOLYLAB_PURE_PYTHON"):
    compiled_impl = None
else:
    try:
        from . import _ckernels as compiled_impl
    except ImportError:
        compiled_impl = None

impl = compiled_impl if compiled_impl is not None else python_impl
BACKEND = "compiled" if compiled_impl is not None else "python"

subset_sums = impl.subset_sums
monomial_window_scan = impl.monomial_window_scan
INSIDE, OUTSIDE, UNDECIDED = python_impl.INSIDE, python_impl.OUTSIDE, python_impl.UNDECIDED

__all__ = ["BACKEND", "subset_sums", "monomial_window_scan", "INSIDE", "OUTSIDE", "UNDECIDED"]
