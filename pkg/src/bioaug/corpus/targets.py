"""Per-task mapping from an instance to what attribution should explain.

Each task contributes two things: the token spans that play the entity
role during leave-one-out scoring, and a restriction text handed to
scorers that condition on the label side of the instance (the relation
definition, the entity-type definitions, the topic definition, or the
question itself).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from bioaug.errors import MissingNotionError
from bioaug.corpus.model import Task, TaskInstance


@dataclass(frozen=True)
class AttributionTarget:
    """Spans to ablate plus the restriction text that frames the scoring."""

    spans: tuple[tuple[int, int], ...]
    restriction_text: str
    labels: tuple[str, ...] = field(default=())


def _notion(table: dict[str, str], label: str) -> str:
    try:
        return table[label]
    except KeyError:
        raise MissingNotionError(label)


def derive_attribution_target(inst: TaskInstance,
                              notions: dict[str, str]) -> AttributionTarget:
    """Resolve the ablation spans and restriction text for one instance.

    Raises MissingNotionError when a required label has no definition in
    ``notions``. QA needs no table entry: the question is its own
    restriction.
    """
    if inst.task is Task.RE:
        e1, e2 = inst.e1, inst.e2
        return AttributionTarget(
            spans=(e1.span, e2.span),
            restriction_text=_notion(notions, inst.relation),
            labels=(inst.relation,),
        )
    if inst.task is Task.NER:
        seen: list[str] = []
        for ent in inst.entities:
            if ent.entity_type not in seen:
                seen.append(ent.entity_type)
        return AttributionTarget(
            spans=tuple(ent.span for ent in inst.entities),
            restriction_text="; ".join(_notion(notions, t) for t in seen),
            labels=tuple(seen),
        )
    if inst.task is Task.TC:
        return AttributionTarget(
            spans=(),
            restriction_text=_notion(notions, inst.topic),
            labels=(inst.topic,),
        )
    # QA: no entity spans, the question itself restricts the scoring.
    return AttributionTarget(spans=(), restriction_text=inst.question or "")
