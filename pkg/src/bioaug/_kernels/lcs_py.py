"""Reference longest-common-subsequence kernel.

Two-row dynamic program over integer token ids. Accepts anything the
compiled kernel accepts: array('i') or any integer sequence.
"""

from __future__ import annotations

from typing import Sequence


def lcs_length(a: Sequence[int], b: Sequence[int]) -> int:
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        return 0
    if m > n:
        a, b = b, a
        n, m = m, n
    prev = [0] * (m + 1)
    cur = [0] * (m + 1)
    for i in range(n):
        ai = a[i]
        for j in range(m):
            if ai == b[j]:
                cur[j + 1] = prev[j] + 1
            else:
                left = cur[j]
                up = prev[j + 1]
                cur[j + 1] = left if left >= up else up
        prev, cur = cur, prev
    return prev[m]
