"""Scorer seam and leave-one-out plumbing.

A scorer turns a token sequence (optionally conditioned on a restriction
text) into one scalar. Everything above this layer only ever asks for
scores of the full sentence and of sentences with tokens removed, so a
memo wrapper guarantees one backend call per distinct sequence and makes
call-count accounting testable.
"""

from __future__ import annotations

import hashlib
import json
import threading
from typing import Iterable, Protocol, Sequence, runtime_checkable

from bioaug.errors import BackendError

TASK_LOGIT = "task-logit"
INFERENCE_RELATIVITY = "inference-relativity"


@runtime_checkable
class Scorer(Protocol):
    """Scalar scoring backend.

    kind is either "task-logit" (restriction ignored) or
    "inference-relativity" (score measures how strongly the sequence
    supports the restriction text).
    """

    kind: str

    def score(self, tokens: Sequence[str], restriction: str | None = None) -> float:
        ...


def sequence_fingerprint(tokens: Sequence[str], restriction: str | None) -> str:
    payload = json.dumps([list(tokens), restriction], ensure_ascii=False,
                         sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class MemoScorer:
    """Memoizing wrapper; safe for concurrent read/insert."""

    def __init__(self, scorer: Scorer):
        self._scorer = scorer
        self._cache: dict[tuple[tuple[str, ...], str | None], float] = {}
        self._lock = threading.Lock()
        self.call_count = 0

    @property
    def kind(self) -> str:
        return self._scorer.kind

    @property
    def distinct_count(self) -> int:
        return len(self._cache)

    def score(self, tokens: Sequence[str], restriction: str | None = None) -> float:
        key = (tuple(tokens), restriction)
        with self._lock:
            self.call_count += 1
            if key in self._cache:
                return self._cache[key]
        value = float(self._scorer.score(list(tokens), restriction))
        with self._lock:
            self._cache.setdefault(key, value)
            return self._cache[key]


def drop(tokens: Sequence[str], indices: Iterable[int]) -> tuple[str, ...]:
    """Sequence with the given token positions removed."""
    gone = set(indices)
    return tuple(t for i, t in enumerate(tokens) if i not in gone)


def loo_score(seq_minus: Sequence[str], scorer: Scorer,
              restriction: str | None = None) -> float:
    """Score one (possibly reduced) sequence, wrapping backend failures.

    Failures surface as a retriable BackendError carrying a fingerprint
    of the exact sequence, so a retry layer can key on it.
    """
    try:
        return float(scorer.score(seq_minus, restriction))
    except BackendError:
        raise
    except Exception as exc:
        raise BackendError(
            f"scorer failed: {exc}", retriable=True,
            fingerprint=sequence_fingerprint(seq_minus, restriction)) from exc


def span_indices(spans: Iterable[tuple[int, int]]) -> set[int]:
    out: set[int] = set()
    for start, end in spans:
        out.update(range(start, end + 1))
    return out
