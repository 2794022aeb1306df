"""Backend seams: deterministic mocks, HTTP clients, cache, wire contracts."""

from bioaug.backends.cache import (
    CachedAgent,
    CachedExtractor,
    CachedGenerator,
    CachedScorer,
    ResponseCache,
    fingerprint,
)
from bioaug.backends.http import HttpAgent, HttpExtractor, HttpGenerator, HttpScorer
from bioaug.backends.registry import (
    make_agents,
    make_extractor,
    make_generator,
    make_relativity_scorer,
    make_scorer,
)

__all__ = [
    "CachedAgent",
    "CachedExtractor",
    "CachedGenerator",
    "CachedScorer",
    "HttpAgent",
    "HttpExtractor",
    "HttpGenerator",
    "HttpScorer",
    "ResponseCache",
    "fingerprint",
    "make_agents",
    "make_extractor",
    "make_generator",
    "make_relativity_scorer",
    "make_scorer",
]
