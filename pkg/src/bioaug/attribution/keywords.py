"""Keyword selection by intersecting the two contribution maps."""

from __future__ import annotations

import math
from dataclasses import dataclass

from bioaug.attribution.maps import AttributionMap


@dataclass(frozen=True)
class KeywordSet:
    """Kept token indices plus the combined-score trace behind the choice."""

    indices: tuple[int, ...]
    n: int
    trace: dict[int, float]

    def __contains__(self, index: int) -> bool:
        return index in self.indices

    def __len__(self) -> int:
        return len(self.indices)


def default_keyword_count(candidate_count: int) -> int:
    """Quarter of the candidates, never fewer than three."""
    return max(3, math.ceil(0.25 * candidate_count))


def _top(entries: dict[int, float], k: int) -> set[int]:
    order = sorted(entries, key=lambda i: (-entries[i], i))
    return set(order[:k])


def select_keywords(map_lex: AttributionMap, map_rel: AttributionMap,
                    n: int) -> KeywordSet:
    """Top-n tokens shared by both maps.

    The combined score of a token is the mean of its two normalized
    entries. Candidates are drawn from the intersection of each map's
    top-2n pool; if that pool runs short, the remaining slots fill by
    combined score over all shared tokens. Ties always break toward the
    lower token index.
    """
    if n < 1:
        raise ValueError(f"keyword count must be >= 1, got {n}")
    common = set(map_lex.entries) & set(map_rel.entries)
    combined = {i: (map_lex.entries[i] + map_rel.entries[i]) / 2.0
                for i in common}
    pool = _top(map_lex.entries, 2 * n) & _top(map_rel.entries, 2 * n) & common
    by_combined = lambda i: (-combined[i], i)
    kept = sorted(pool, key=by_combined)[:n]
    if len(kept) < n:
        rest = sorted((i for i in common if i not in set(kept)), key=by_combined)
        kept.extend(rest[:n - len(kept)])
    return KeywordSet(indices=tuple(sorted(kept)), n=n, trace=combined)
