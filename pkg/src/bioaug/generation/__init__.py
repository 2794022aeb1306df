"""Generation stage: exemplar sampling, key structures, infill, projection."""

from bioaug.generation.contracts import ExtractorBackend, GeneratorBackend
from bioaug.generation.infill import (
    AugCandidate,
    generate_candidate,
    locate_spans,
    project_labels,
    strip_markers,
)
from bioaug.generation.sampling import sample_similar
from bioaug.generation.similarity import SimilarityFn, token_lcs_similarity
from bioaug.generation.structure import (
    DEFAULT_MAX_ROUNDS,
    SIMILARITY_THRESHOLD,
    KeyStructure,
    extract_key_structure,
)

__all__ = [
    "AugCandidate",
    "DEFAULT_MAX_ROUNDS",
    "ExtractorBackend",
    "GeneratorBackend",
    "KeyStructure",
    "SIMILARITY_THRESHOLD",
    "SimilarityFn",
    "extract_key_structure",
    "generate_candidate",
    "locate_spans",
    "project_labels",
    "sample_similar",
    "strip_markers",
    "token_lcs_similarity",
]
