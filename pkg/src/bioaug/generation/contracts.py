"""Backend seams for the generation stage.

Both seams are duck-typed protocols so HTTP clients and in-process mocks
interchange freely. A backend that cannot take concurrent requests sets
``concurrency_safe = False`` and the orchestrator serializes around it.
"""

from __future__ import annotations

from typing import Protocol, Sequence, runtime_checkable

from bioaug.attribution.template import MaskedTemplate


@runtime_checkable
class GeneratorBackend(Protocol):
    """Fills a masked template into a full candidate token sequence.

    Contract: the output contains every marked entity surface verbatim
    and no mask sentinel. Inline type markers around entities are
    allowed and are stripped by the caller.
    """

    concurrency_safe: bool

    def infill(self, template: MaskedTemplate, restriction_text: str,
               key_structure: str, seed: int) -> Sequence[str]:
        ...


@runtime_checkable
class ExtractorBackend(Protocol):
    """Proposes a shared key-structure string for a group of sentences.

    ``sentences`` always lists the target sentence first. On a retry the
    failing (source, similarity) pairs from the previous round are
    passed so the backend can steer its next proposal.
    """

    concurrency_safe: bool

    def propose(self, sentences: Sequence[str],
                failing_pairs: Sequence[tuple[str, float]] | None = None) -> str:
        ...
