"""Leave-one-out contribution maps and their normalizations.

Two maps are built per sentence. The lexicon map asks how much each
non-entity token props up the target entity's score. The relation map
asks how much each token props up the joint contribution of the entity
spans toward a restriction text (the relation or type definition). Both
reduce to sums and differences of scores of token-deleted sentences.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from bioaug.errors import DegenerateMapError, NoCandidateKeywordsError
from bioaug.corpus.targets import AttributionTarget
from bioaug.attribution.scorers import Scorer, drop, loo_score, span_indices


@dataclass(frozen=True)
class AttributionMap:
    """Per-token contribution scores for one sentence.

    entries are keyed by token index so duplicate surface forms stay
    distinguishable. anchors pin the values that normalization holds
    fixed (the reference keyword for the lexicon map, the two boundary
    evaluations for the relation map).
    """

    tokens: tuple[str, ...]
    entries: dict[int, float]
    target: AttributionTarget
    normalized: bool = False
    anchors: dict[str, float] = field(default_factory=dict)
    flags: tuple[str, ...] = ()

    def ranked(self) -> list[int]:
        """Token indices from strongest to weakest, ties to lower index."""
        return sorted(self.entries, key=lambda i: (-self.entries[i], i))

    def to_report(self) -> dict:
        return {
            "tokens": list(self.tokens),
            "entries": [
                {"index": i, "token": self.tokens[i], "value": self.entries[i]}
                for i in sorted(self.entries)
            ],
            "spans": [list(s) for s in self.target.spans],
            "restriction_text": self.target.restriction_text,
            "normalized": self.normalized,
            "anchors": dict(sorted(self.anchors.items())),
            "flags": list(self.flags),
        }


def _candidate_indices(tokens: Sequence[str], target: AttributionTarget,
                       candidates: Sequence[int] | None) -> list[int]:
    blocked = span_indices(target.spans)
    if candidates is None:
        chosen = [i for i in range(len(tokens)) if i not in blocked]
    else:
        chosen = sorted(set(candidates) - blocked)
    if len(chosen) < 2:
        raise NoCandidateKeywordsError("no candidate keywords")
    return chosen


def lexicon_map(tokens: Sequence[str], span: tuple[int, int], scorer: Scorer,
                target: AttributionTarget,
                candidates: Sequence[int] | None = None) -> AttributionMap:
    """Raw per-token support for the entity at ``span``.

    For each candidate w the entry is the drop in the entity's own
    leave-one-out contribution caused by deleting w:

        entry(w) = [score(s) - score(s\\e)] - [score(s\\w) - score(s\\{e,w})]

    Candidates default to every token outside the target spans.
    """
    toks = tuple(tokens)
    chosen = _candidate_indices(toks, target, candidates)
    ent = set(range(span[0], span[1] + 1))
    full = loo_score(toks, scorer)
    no_ent = loo_score(drop(toks, ent), scorer)
    attr_e = full - no_ent
    entries = {}
    for w in chosen:
        no_w = loo_score(drop(toks, {w}), scorer)
        no_both = loo_score(drop(toks, ent | {w}), scorer)
        entries[w] = attr_e - (no_w - no_both)
    return AttributionMap(tokens=toks, entries=entries, target=target)


def relation_map_spans(tokens: Sequence[str], spans: Sequence[tuple[int, int]],
                       restriction: str, scorer: Scorer,
                       target: AttributionTarget,
                       candidates: Sequence[int] | None = None) -> AttributionMap:
    """Raw per-token support for the joint contribution of ``spans``.

    Scores are taken against the restriction text. The two anchor
    evaluations (full sentence, all spans removed) ride along for the
    affine normalization.
    """
    if not restriction:
        raise DegenerateMapError("restriction text is required")
    seen: set[int] = set()
    for s in spans:
        span_set = set(range(s[0], s[1] + 1))
        if span_set & seen:
            raise DegenerateMapError("entity spans overlap")
        seen |= span_set
    toks = tuple(tokens)
    chosen = _candidate_indices(toks, target, candidates)
    a1 = loo_score(toks, scorer, restriction)
    a0 = loo_score(drop(toks, seen), scorer, restriction)
    joint = a1 - a0
    entries = {}
    for w in chosen:
        no_w = loo_score(drop(toks, {w}), scorer, restriction)
        no_both = loo_score(drop(toks, seen | {w}), scorer, restriction)
        entries[w] = joint - (no_w - no_both)
    return AttributionMap(tokens=toks, entries=entries, target=target,
                          anchors={"full_sentence": a1, "no_entities": a0})


def relation_map(tokens: Sequence[str], span1: tuple[int, int],
                 span2: tuple[int, int], restriction: str, scorer: Scorer,
                 target: AttributionTarget,
                 candidates: Sequence[int] | None = None) -> AttributionMap:
    """Two-entity form of relation_map_spans."""
    return relation_map_spans(tokens, (span1, span2), restriction, scorer,
                              target, candidates)


def simple_loo_map(tokens: Sequence[str], scorer: Scorer,
                   target: AttributionTarget,
                   restriction: str | None = None,
                   candidates: Sequence[int] | None = None) -> AttributionMap:
    """Drop-one map with no entity spans: entry(w) = score(s) - score(s\\w).

    Used for tasks whose instances carry no entity mentions; the
    restriction (topic definition or question) does the targeting.
    """
    toks = tuple(tokens)
    chosen = _candidate_indices(toks, target, candidates)
    full = loo_score(toks, scorer, restriction)
    entries = {w: full - loo_score(drop(toks, {w}), scorer, restriction)
               for w in chosen}
    return AttributionMap(tokens=toks, entries=entries, target=target,
                          anchors={"full_sentence": full})


def pair_contribution(tokens: Sequence[str], span1: tuple[int, int],
                      span2: tuple[int, int], scorer: Scorer) -> float:
    """Contribution of one entity to the other's attribution.

    Under leave-one-out the two directions coincide:

        attr(e1 <- e2) = score(s) - score(s\\e1) - score(s\\e2) + score(s\\{e1,e2})

    which is symmetric in the spans, so the larger-direction rule is
    satisfied by computing it once.
    """
    toks = tuple(tokens)
    s1 = set(range(span1[0], span1[1] + 1))
    s2 = set(range(span2[0], span2[1] + 1))
    return (loo_score(toks, scorer)
            - loo_score(drop(toks, s1), scorer)
            - loo_score(drop(toks, s2), scorer)
            + loo_score(drop(toks, s1 | s2), scorer))


def normalize_lexicon(amap: AttributionMap, reference: float) -> AttributionMap:
    """Scale every entry by the reference so the reference pins at 1.

    Negative entries stay negative and keep ranking last. A reference
    that is not strictly positive cannot serve as a scale; callers fall
    back to rank_normalize and flag the instance.
    """
    if reference <= 0:
        raise DegenerateMapError(f"non-positive reference {reference!r}")
    entries = {i: v / reference for i, v in amap.entries.items()}
    return replace(amap, entries=entries, normalized=True,
                   anchors={"reference": 1.0})


def normalize_relation(amap: AttributionMap) -> AttributionMap:
    """Affine-map entries so the anchors land exactly on 1 and 0."""
    try:
        a1 = amap.anchors["full_sentence"]
        a0 = amap.anchors["no_entities"]
    except KeyError as exc:
        raise DegenerateMapError(f"missing anchor {exc.args[0]!r}")
    if a1 == a0:
        raise DegenerateMapError("anchors coincide; relation indistinguishable")
    flags = amap.flags
    if a1 < a0:
        flags = flags + ("inverted-anchors",)
    entries = {i: (v - a0) / (a1 - a0) for i, v in amap.entries.items()}
    return replace(amap, entries=entries, normalized=True, flags=flags,
                   anchors={"full_sentence": 1.0, "no_entities": 0.0})


def rank_normalize(amap: AttributionMap) -> AttributionMap:
    """Order-preserving fallback: descending rank mapped linearly onto [0, 1]."""
    order = amap.ranked()
    if len(order) == 1:
        entries = {order[0]: 1.0}
    else:
        step = 1.0 / (len(order) - 1)
        entries = {idx: 1.0 - pos * step for pos, idx in enumerate(order)}
    return replace(amap, entries=entries, normalized=True,
                   flags=amap.flags + ("rank-normalized",), anchors={})
