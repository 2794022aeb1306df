"""Benchmark the compiled LCS kernel against its pure-Python twin.

Run from the repository root:

    python3 benchmarks/bench_lcs.py [--sizes 16,64,256] [--repeats 200]

The kernel computes longest-common-subsequence length over token id
sequences, which dominates structure-similarity scoring. The benchmark
reports per-call time for both implementations on random id pairs and
fails loudly if the two ever disagree on a result.
"""

from __future__ import annotations

import argparse
import random
import time
from array import array

from bioaug._kernels import KERNEL_IMPL, lcs_length, lcs_length_py


def bench_one(fn, pairs, repeats: int) -> float:
    """Mean seconds per call over repeats x len(pairs) invocations."""
    best = float("inf")
    for _ in range(3):
        started = time.perf_counter()
        for _ in range(repeats):
            for a, b in pairs:
                fn(a, b)
        elapsed = time.perf_counter() - started
        best = min(best, elapsed / (repeats * len(pairs)))
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="16,64,256",
                        help="comma-separated sequence lengths")
    parser.add_argument("--repeats", type=int, default=200,
                        help="timing repeats per pair set")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    rng = random.Random(args.seed)
    print(f"selected kernel implementation: {KERNEL_IMPL}")
    if KERNEL_IMPL != "cython":
        print("note: compiled kernel unavailable; comparing python vs python")

    header = f"{'length':>8} {'compiled (us)':>14} {'pure (us)':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for size in sizes:
        pairs = []
        for _ in range(8):
            a = array("i", (rng.randrange(50) for _ in range(size)))
            b = array("i", (rng.randrange(50) for _ in range(size)))
            pairs.append((a, b))
        for a, b in pairs:
            assert lcs_length(a, b) == lcs_length_py(a, b)
        repeats = max(1, args.repeats // max(1, size // 16))
        compiled = bench_one(lcs_length, pairs, repeats)
        pure = bench_one(lcs_length_py, pairs, repeats)
        print(f"{size:>8} {compiled * 1e6:>14.2f} {pure * 1e6:>12.2f} "
              f"{pure / compiled:>8.1f}x")


if __name__ == "__main__":
    main()
