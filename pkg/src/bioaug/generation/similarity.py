"""Sentence similarity for the key-structure loop.

The default measure is a length-normalized longest common subsequence
over word tokens: deterministic, symmetric, 1.0 on identical strings,
0.0 on token-disjoint ones. Callers may swap in any callable with the
same signature (an embedding cosine, for instance).
"""

from __future__ import annotations

from array import array
from typing import Callable

from bioaug._kernels import lcs_length
from bioaug.corpus.model import token_texts

SimilarityFn = Callable[[str, str], float]


def _ids(tokens: list[str], vocab: dict[str, int]) -> array:
    return array("i", (vocab.setdefault(t, len(vocab)) for t in tokens))


def token_lcs_similarity(a: str, b: str) -> float:
    """LCS length over the longer token count, in [0, 1]."""
    ta, tb = token_texts(a), token_texts(b)
    if not ta and not tb:
        return 1.0
    if not ta or not tb:
        return 0.0
    vocab: dict[str, int] = {}
    common = lcs_length(_ids(ta, vocab), _ids(tb, vocab))
    return common / max(len(ta), len(tb))
