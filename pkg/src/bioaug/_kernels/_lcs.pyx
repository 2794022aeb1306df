# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled longest-common-subsequence kernel over int token id arrays."""

from cpython.array cimport array, clone


def lcs_length(a, b):
    """LCS length of two integer sequences (arrays preferred, lists accepted)."""
    cdef array templ = array('i')
    cdef array aa = a if isinstance(a, array) else array('i', a)
    cdef array bb = b if isinstance(b, array) else array('i', b)
    cdef int[::1] av = aa
    cdef int[::1] bv = bb
    cdef Py_ssize_t n = av.shape[0]
    cdef Py_ssize_t m = bv.shape[0]
    if n == 0 or m == 0:
        return 0
    if m > n:
        av, bv = bv, av
        n, m = m, n
    cdef array prev_a = clone(templ, m + 1, zero=True)
    cdef array cur_a = clone(templ, m + 1, zero=True)
    cdef int[::1] prev = prev_a
    cdef int[::1] cur = cur_a
    cdef Py_ssize_t i, j
    cdef int ai, left, up
    for i in range(n):
        ai = av[i]
        for j in range(m):
            if ai == bv[j]:
                cur[j + 1] = prev[j] + 1
            else:
                left = cur[j]
                up = prev[j + 1]
                cur[j + 1] = left if left >= up else up
        prev, cur = cur, prev
    return prev[m]
