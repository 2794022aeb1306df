"""Key-structure extraction with the similarity acceptance loop."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from bioaug.errors import BackendError, NoExemplarsError
from bioaug.generation.contracts import ExtractorBackend
from bioaug.generation.similarity import SimilarityFn, token_lcs_similarity

SIMILARITY_THRESHOLD = 0.80
DEFAULT_MAX_ROUNDS = 5


@dataclass(frozen=True)
class KeyStructure:
    """A structure string plus the similarity evidence that admitted it.

    scores maps each source-with-notion string to its similarity against
    the structure. best_effort marks a structure returned on loop
    exhaustion rather than acceptance.
    """

    text: str
    rounds: int
    scores: dict[str, float]
    best_effort: bool = False

    @property
    def min_score(self) -> float:
        return min(self.scores.values())


def extract_key_structure(target: str, exemplars: Sequence[str], r_bio: str,
                          extractor: ExtractorBackend,
                          threshold: float = SIMILARITY_THRESHOLD,
                          max_rounds: int = DEFAULT_MAX_ROUNDS,
                          similarity_fn: SimilarityFn = token_lcs_similarity,
                          ) -> KeyStructure:
    """Iterate the extractor until every source clears the threshold.

    Each round proposes a structure and scores it against every source
    sentence concatenated with the notion text, the target included. A
    failing round feeds its failing pairs back to the extractor. When
    max_rounds pass without acceptance, the round with the best worst
    score wins (earliest such round on a tie) and is flagged.
    """
    if not exemplars:
        raise NoExemplarsError("no structural exemplars")
    sources = [f"{text} | {r_bio}" for text in [target, *exemplars]]
    sentences = [target, *exemplars]
    failing: list[tuple[str, float]] | None = None
    best: KeyStructure | None = None
    for round_no in range(1, max_rounds + 1):
        try:
            proposal = extractor.propose(sentences, failing_pairs=failing)
        except BackendError:
            raise
        except Exception as exc:
            raise BackendError(f"extractor failed: {exc}", retriable=True) from exc
        scores = {src: similarity_fn(proposal, src) for src in sources}
        candidate = KeyStructure(text=proposal, rounds=round_no, scores=scores)
        if all(v > threshold for v in scores.values()):
            return candidate
        if best is None or candidate.min_score > best.min_score:
            best = candidate
        failing = [(src, v) for src, v in scores.items() if v <= threshold]
    assert best is not None
    return KeyStructure(text=best.text, rounds=max_rounds, scores=best.scores,
                        best_effort=True)
