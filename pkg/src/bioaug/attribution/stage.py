"""Per-instance orchestration of the attribution stage.

Builds both contribution maps for one instance, normalizes them (falling
back to rank normalization when the lexicon reference is unusable),
intersects the keyword sets, and emits the masked template. Task kinds
differ only in how the maps are targeted:

* relation instances use the pair for both maps
* entity-only instances use the first span as the lexicon target and
  every span for the relation map; a single entity has no pair, so the
  lexicon map rank-normalizes
* topic and question instances carry no spans at all and fall back to
  plain drop-one maps against the restriction text
"""

from __future__ import annotations

from dataclasses import dataclass

from bioaug.corpus.model import Task, TaskInstance
from bioaug.corpus.targets import AttributionTarget, derive_attribution_target
from bioaug.errors import DegenerateMapError
from bioaug.attribution.keywords import KeywordSet, default_keyword_count, select_keywords
from bioaug.attribution.maps import (
    AttributionMap,
    lexicon_map,
    normalize_lexicon,
    normalize_relation,
    pair_contribution,
    rank_normalize,
    relation_map_spans,
    simple_loo_map,
)
from bioaug.attribution.scorers import MemoScorer, Scorer
from bioaug.attribution.template import MaskedTemplate, build_masked_template

LEXICON_RANK_FALLBACK = "lexicon-rank-fallback"


@dataclass(frozen=True)
class WhereResult:
    """Everything the attribution stage learned about one instance."""

    instance_id: str
    target: AttributionTarget
    map_lexicon: AttributionMap
    map_relation: AttributionMap
    keywords: KeywordSet
    template: MaskedTemplate
    flags: tuple[str, ...] = ()


def _memo(scorer: Scorer) -> MemoScorer:
    return scorer if isinstance(scorer, MemoScorer) else MemoScorer(scorer)


def where_stage(inst: TaskInstance, notions: dict[str, str],
                task_scorer: Scorer, relativity_scorer: Scorer,
                n: int | None = None) -> WhereResult:
    """Compute maps, keywords and the masked template for one instance.

    Degenerate relation anchors raise DegenerateMapError; the pipeline
    isolates such instances rather than aborting the run.
    """
    target = derive_attribution_target(inst, notions)
    task_scorer = _memo(task_scorer)
    relativity_scorer = _memo(relativity_scorer)
    tokens = inst.tokens
    flags: list[str] = []

    if target.spans:
        raw_lex = lexicon_map(tokens, target.spans[0], task_scorer, target)
        if len(target.spans) >= 2:
            reference = pair_contribution(tokens, target.spans[0],
                                          target.spans[1], task_scorer)
        else:
            reference = 0.0
        try:
            lex = normalize_lexicon(raw_lex, reference)
        except DegenerateMapError:
            lex = rank_normalize(raw_lex)
            flags.append(LEXICON_RANK_FALLBACK)
        rel = normalize_relation(relation_map_spans(
            tokens, target.spans, target.restriction_text,
            relativity_scorer, target))
        if inst.task is Task.RE:
            marked = (inst.e1, inst.e2)
        else:
            marked = inst.entities
    else:
        lex = rank_normalize(simple_loo_map(tokens, task_scorer, target))
        rel = rank_normalize(simple_loo_map(
            tokens, relativity_scorer, target,
            restriction=target.restriction_text))
        marked = ()

    if n is None:
        n = default_keyword_count(len(lex.entries))
    keywords = select_keywords(lex, rel, n)
    template = build_masked_template(tokens, keywords.indices, marked)
    return WhereResult(
        instance_id=inst.id,
        target=target,
        map_lexicon=lex,
        map_relation=rel,
        keywords=keywords,
        template=template,
        flags=tuple(flags),
    )
