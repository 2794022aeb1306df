"""Leave-one-out attribution: contribution maps, keywords, masked templates."""

from bioaug.attribution.keywords import KeywordSet, default_keyword_count, select_keywords
from bioaug.attribution.maps import (
    AttributionMap,
    lexicon_map,
    normalize_lexicon,
    normalize_relation,
    pair_contribution,
    rank_normalize,
    relation_map,
    relation_map_spans,
    simple_loo_map,
)
from bioaug.attribution.scorers import (
    INFERENCE_RELATIVITY,
    TASK_LOGIT,
    MemoScorer,
    Scorer,
    drop,
    loo_score,
    sequence_fingerprint,
)
from bioaug.attribution.stage import LEXICON_RANK_FALLBACK, WhereResult, where_stage
from bioaug.attribution.template import (
    MASK_SENTINEL,
    MaskedTemplate,
    build_masked_template,
    escape_markup,
    parse_rendered_template,
    render_marked_entity,
    unescape_markup,
)

__all__ = [
    "AttributionMap",
    "INFERENCE_RELATIVITY",
    "KeywordSet",
    "LEXICON_RANK_FALLBACK",
    "MASK_SENTINEL",
    "MaskedTemplate",
    "MemoScorer",
    "Scorer",
    "TASK_LOGIT",
    "WhereResult",
    "build_masked_template",
    "default_keyword_count",
    "drop",
    "escape_markup",
    "lexicon_map",
    "loo_score",
    "normalize_lexicon",
    "normalize_relation",
    "pair_contribution",
    "parse_rendered_template",
    "rank_normalize",
    "relation_map",
    "relation_map_spans",
    "render_marked_entity",
    "select_keywords",
    "sequence_fingerprint",
    "simple_loo_map",
    "unescape_markup",
    "where_stage",
]
