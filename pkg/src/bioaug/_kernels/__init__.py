"""Hot-loop kernels with a compiled fast path.

The longest-common-subsequence length over token id arrays dominates
similarity scoring, so it gets a Cython implementation. The pure-Python
twin is always available and is forced by setting BIOAUG_PURE_PYTHON=1,
which keeps the package usable where no compiler ran at install time.
"""

from __future__ import annotations

import os

from bioaug._kernels.lcs_py import lcs_length as _lcs_py

if os.environ.get("BIOAUG_PURE_PYTHON") == "1":
    lcs_length = _lcs_py
    KERNEL_IMPL = "python"
else:
    try:
        from bioaug._kernels._lcs import lcs_length  # type: ignore[no-redef]
        KERNEL_IMPL = "cython"
    except ImportError:
        lcs_length = _lcs_py
        KERNEL_IMPL = "python"

__all__ = ["lcs_length", "lcs_length_py", "KERNEL_IMPL"]

lcs_length_py = _lcs_py
