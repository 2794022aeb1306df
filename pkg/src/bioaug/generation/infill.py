"""Candidate generation from a masked template plus label projection."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

from bioaug.errors import ContractViolationError, SpanRecoveryError
from bioaug.corpus.model import EntityMention, Provenance, Task, TaskInstance
from bioaug.attribution.template import MaskedTemplate, unescape_markup
from bioaug.generation.contracts import GeneratorBackend

_OPEN_MARKER = re.compile(r"^<s:(.+)>$")
_CLOSE_MARKER = re.compile(r"^</s:(.+)>$")


@dataclass(frozen=True)
class AugCandidate:
    """A filled-in sentence with its entities re-located.

    entity_spans aligns with the template's marked entities. meta keeps
    whatever the pipeline wants on record (backend id, seed, exemplar
    count, keyword count).
    """

    tokens: tuple[str, ...]
    entity_spans: tuple[tuple[int, int], ...] | None
    parent_id: str
    meta: dict = field(default_factory=dict)
    trivial: bool = False

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


def strip_markers(tokens: Sequence[str],
                  ) -> tuple[list[str], list[tuple[str, int, int]]]:
    """Remove inline type markers, reporting each marked run.

    Returns the clean token list and (entity_type, start, end) runs in
    clean-token coordinates. Unbalanced markers are a contract breach.
    """
    clean: list[str] = []
    runs: list[tuple[str, int, int]] = []
    open_stack: list[tuple[str, int]] = []
    for tok in tokens:
        m = _OPEN_MARKER.match(tok)
        if m:
            open_stack.append((unescape_markup(m.group(1)), len(clean)))
            continue
        m = _CLOSE_MARKER.match(tok)
        if m:
            etype = unescape_markup(m.group(1))
            if not open_stack or open_stack[-1][0] != etype:
                raise ContractViolationError(f"unbalanced close marker for {etype!r}")
            _, start = open_stack.pop()
            if len(clean) == start:
                raise ContractViolationError(f"empty marker pair for {etype!r}")
            runs.append((etype, start, len(clean) - 1))
            continue
        clean.append(tok)
    if open_stack:
        raise ContractViolationError(f"unclosed marker for {open_stack[-1][0]!r}")
    return clean, runs


def _occurrences(tokens: Sequence[str], surface_tokens: list[str],
                 claimed: set[int]) -> list[int]:
    n = len(surface_tokens)
    hits = []
    for i in range(len(tokens) - n + 1):
        window = range(i, i + n)
        if list(tokens[i:i + n]) == surface_tokens and not (set(window) & claimed):
            hits.append(i)
    return hits


def locate_spans(tokens: Sequence[str], entities: Sequence[EntityMention],
                 marked: dict[int, tuple[int, int]] | None = None,
                 ) -> tuple[tuple[int, int], ...]:
    """Resolve each entity's span in a candidate sentence.

    Marked entities take their marker-recovered span directly. Unmarked
    surfaces must occur exactly as many times as they are needed;
    anything extra is ambiguous and anything missing is unrecoverable.
    """
    marked = marked or {}
    claimed: set[int] = set()
    for span in marked.values():
        claimed.update(range(span[0], span[1] + 1))
    spans: list[tuple[int, int] | None] = [marked.get(i) for i in range(len(entities))]

    unresolved = [i for i, s in enumerate(spans) if s is None]
    by_surface: dict[str, list[int]] = {}
    for i in unresolved:
        by_surface.setdefault(entities[i].surface, []).append(i)
    for surface, wanting in by_surface.items():
        surface_tokens = surface.split(" ")
        hits = _occurrences(tokens, surface_tokens, claimed)
        if len(hits) < len(wanting):
            raise SpanRecoveryError(f"entity surface not recoverable: {surface!r}")
        if len(hits) > len(wanting):
            raise SpanRecoveryError(
                f"entity surface ambiguous without markers: {surface!r}")
        for i, start in zip(wanting, hits):
            spans[i] = (start, start + len(surface_tokens) - 1)
            claimed.update(range(start, start + len(surface_tokens)))
    return tuple(s for s in spans if s is not None)


def generate_candidate(template: MaskedTemplate, restriction_text: str,
                       key_structure: str, backend: GeneratorBackend,
                       rng_seed: int, parent_id: str = "",
                       meta: dict | None = None) -> AugCandidate:
    """Run the infill backend and verify its output contract.

    A backend that leaks the mask sentinel or loses an entity surface
    violated its contract; the error names the broken invariant. Output
    identical to the source sentence is legal but flagged trivial.
    """
    raw = backend.infill(template, restriction_text, key_structure, rng_seed)
    clean, runs = strip_markers(list(raw))
    if template.sentinel in clean:
        raise ContractViolationError(
            f"mask sentinel {template.sentinel!r} present in backend output")
    for ent in template.entities:
        if not _occurrences(clean, ent.surface.split(" "), set()):
            raise ContractViolationError(f"entity surface dropped: {ent.surface!r}")

    full_meta = dict(meta or {})
    full_meta["seed"] = rng_seed
    full_meta.setdefault("backend", type(backend).__name__)

    if tuple(clean) == template.source_tokens:
        spans = tuple(e.span for e in template.entities)
        return AugCandidate(tokens=tuple(clean), entity_spans=spans,
                            parent_id=parent_id, meta=full_meta, trivial=True)

    marked: dict[int, tuple[int, int]] = {}
    used_runs: set[int] = set()
    for i, ent in enumerate(template.entities):
        for j, (etype, start, end) in enumerate(runs):
            if j in used_runs:
                continue
            if etype == ent.entity_type and " ".join(clean[start:end + 1]) == ent.surface:
                marked[i] = (start, end)
                used_runs.add(j)
                break
    spans = locate_spans(clean, template.entities, marked)
    return AugCandidate(tokens=tuple(clean), entity_spans=spans,
                        parent_id=parent_id, meta=full_meta, trivial=False)


def project_labels(parent: TaskInstance, cand: AugCandidate) -> TaskInstance:
    """Build the augmented instance, carrying the parent's labels over.

    The label side (relation, topic, question, answer) is copied
    verbatim; only tokens and entity spans change. Candidates built
    outside generate_candidate may omit entity_spans, in which case the
    spans are recovered here and ambiguity is an error.
    """
    if parent.task is Task.RE:
        marked = (parent.e1, parent.e2)
    elif parent.task is Task.NER:
        marked = parent.entities
    else:
        marked = ()
    spans = cand.entity_spans
    if spans is None:
        spans = locate_spans(cand.tokens, marked)
    if len(spans) != len(marked):
        raise SpanRecoveryError(
            f"expected {len(marked)} entity spans, got {len(spans)}")
    entities = tuple(
        EntityMention.from_tokens(list(cand.tokens), span, ent.entity_type)
        for ent, span in zip(marked, spans))
    return TaskInstance(
        id=f"{parent.id}-aug",
        task=parent.task,
        tokens=cand.tokens,
        entities=entities,
        pair=(0, 1) if parent.task is Task.RE else None,
        relation=parent.relation,
        topic=parent.topic,
        question=parent.question,
        answer=parent.answer,
        provenance=Provenance.augmented(parent.id),
    )
