"""Compiled LCS kernel vs the pure-Python twin vs a full-table reference."""

from __future__ import annotations

import os
import subprocess
import sys
from array import array

from hypothesis import given, strategies as st

from bioaug._kernels import KERNEL_IMPL, lcs_length, lcs_length_py

from oracles import lcs_table

ids = st.lists(st.integers(min_value=0, max_value=9), max_size=24)


class TestAgreement:
    @given(ids, ids)
    def test_all_three_implementations_agree(self, a, b):
        expected = lcs_table(a, b)
        assert lcs_length_py(a, b) == expected
        assert lcs_length(a, b) == expected

    @given(ids, ids)
    def test_symmetry(self, a, b):
        assert lcs_length(a, b) == lcs_length(b, a)

    def test_accepts_int_arrays(self):
        a = array("i", [1, 2, 3, 4])
        b = array("i", [1, 9, 3])
        assert lcs_length(a, b) == lcs_length_py(a, b) == 2


class TestEdgeCases:
    def test_empty_inputs(self):
        assert lcs_length([], []) == 0
        assert lcs_length([1, 2], []) == 0
        assert lcs_length([], [1, 2]) == 0

    def test_identical(self):
        assert lcs_length([5, 6, 7], [5, 6, 7]) == 3

    def test_disjoint(self):
        assert lcs_length([1, 2, 3], [4, 5, 6]) == 0

    def test_subsequence_not_substring(self):
        assert lcs_length([1, 9, 2, 9, 3], [1, 2, 3]) == 3

    def test_repeats(self):
        assert lcs_length([1, 1, 1], [1, 1]) == 2


class TestSelection:
    def test_compiled_kernel_active_here(self):
        # The build step compiled the extension in this environment, so the
        # fast path must be the one actually selected.
        assert KERNEL_IMPL == "cython"
        assert lcs_length is not lcs_length_py

    def test_env_var_forces_pure_python(self):
        code = (
            "from bioaug._kernels import KERNEL_IMPL, lcs_length, lcs_length_py\n"
            "assert KERNEL_IMPL == 'python', KERNEL_IMPL\n"
            "assert lcs_length is lcs_length_py\n"
            "assert lcs_length([1, 2, 3], [1, 3]) == 2\n"
        )
        env = dict(os.environ, BIOAUG_PURE_PYTHON="1")
        subprocess.run([sys.executable, "-c", code], check=True, env=env)
