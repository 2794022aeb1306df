"""Attribution-guided, debate-filtered data augmentation for biomedical NLP.

The pipeline answers two questions about every sentence it rewrites:

* WHERE may the text change? Dual leave-one-out contribution maps (one for
  lexical relatedness to the target entities, one for relatedness to the
  relation's textual definition) pick the keywords that must survive; all
  other non-entity tokens are masked into an infill template.
* WHICH rewrite survives? An iterative multi-agent debate reviews, revises
  and grades each generated candidate until it clears an acceptance score.

All neural models sit behind three pluggable seams (scorers, generators,
chat agents); deterministic in-process mocks define the contracts and a
separate HTTP sidecar can serve live models.
"""

__version__ = "0.1.0"
