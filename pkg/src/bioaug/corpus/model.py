"""Core data model: tokens, entity mentions, task instances, datasets.

One canonical schema covers the four supported task shapes (NER, RE, TC,
QA). Instances are immutable after load and safe to share across worker
threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterator


class Task(str, Enum):
    NER = "NER"
    RE = "RE"
    TC = "TC"
    QA = "QA"


# Word runs or single punctuation marks; whitespace never survives.
_TOKEN_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)


@dataclass(frozen=True)
class Token:
    """One token with its 0-based position and original character offsets."""

    text: str
    index: int
    start: int = -1
    end: int = -1


def tokenize(text: str) -> list[Token]:
    """Split on whitespace and punctuation, keeping character offsets."""
    return [
        Token(m.group(), i, m.start(), m.end())
        for i, m in enumerate(_TOKEN_RE.finditer(text))
    ]


def token_texts(text: str) -> list[str]:
    return [t.text for t in tokenize(text)]


@dataclass(frozen=True)
class EntityMention:
    """A typed entity occupying an inclusive token range of its sentence."""

    span: tuple[int, int]
    entity_type: str
    surface: str

    @property
    def start(self) -> int:
        return self.span[0]

    @property
    def end(self) -> int:
        return self.span[1]

    def indices(self) -> range:
        return range(self.span[0], self.span[1] + 1)

    @classmethod
    def from_tokens(cls, tokens: list[str], span: tuple[int, int], entity_type: str) -> "EntityMention":
        surface = " ".join(tokens[span[0]:span[1] + 1])
        return cls(span=(span[0], span[1]), entity_type=entity_type, surface=surface)


@dataclass(frozen=True)
class Provenance:
    kind: str = "original"
    parent_id: str | None = None

    @classmethod
    def original(cls) -> "Provenance":
        return cls("original", None)

    @classmethod
    def augmented(cls, parent_id: str) -> "Provenance":
        return cls("augmented", parent_id)

    @property
    def is_augmented(self) -> bool:
        return self.kind == "augmented"


@dataclass(frozen=True)
class TaskInstance:
    """One labeled example in the canonical schema.

    ``tokens`` holds the sentence (NER/RE) or full passage (TC/QA).
    ``pair`` indexes into ``entities`` and names the ordered (subject,
    object) pair of an RE instance. ``char_offsets`` preserves the
    original character positions when the instance came from raw text.
    """

    id: str
    task: Task
    tokens: tuple[str, ...]
    entities: tuple[EntityMention, ...] = ()
    pair: tuple[int, int] | None = None
    relation: str | None = None
    topic: str | None = None
    question: str | None = None
    answer: str | None = None
    provenance: Provenance = field(default_factory=Provenance.original)
    char_offsets: tuple[tuple[int, int], ...] | None = None

    @property
    def text(self) -> str:
        return " ".join(self.tokens)

    @property
    def e1(self) -> EntityMention:
        return self.entities[self.pair[0]]

    @property
    def e2(self) -> EntityMention:
        return self.entities[self.pair[1]]

    def with_tokens(self, tokens: list[str], entities: list[EntityMention]) -> "TaskInstance":
        return replace(self, tokens=tuple(tokens), entities=tuple(entities),
                       char_offsets=None)


def validate_instance(inst: TaskInstance, known_ids: set[str] | None = None) -> list[str]:
    """Check every schema invariant; returns a list of violations (empty if valid).

    ``known_ids`` enables the dataset-level check that an augmented
    instance's parent actually exists.
    """
    report: list[str] = []
    n = len(inst.tokens)

    if not inst.id:
        report.append("empty id")
    if not isinstance(inst.task, Task):
        report.append(f"unknown task {inst.task!r}")
        return report
    if n == 0:
        report.append("empty token sequence")
    for i, tok in enumerate(inst.tokens):
        if not tok:
            report.append(f"empty token at index {i}")
    if inst.char_offsets is not None and len(inst.char_offsets) != n:
        report.append("char_offsets length does not match tokens")

    for ent in inst.entities:
        s, e = ent.span
        if s > e:
            report.append(f"entity span reversed: {ent.span}")
        elif s < 0 or e >= n:
            report.append(f"span out of bounds: {ent.span}")
        else:
            joined = " ".join(inst.tokens[s:e + 1])
            if ent.surface != joined:
                report.append(
                    f"surface mismatch at {ent.span}: {ent.surface!r} != {joined!r}")
        if not ent.entity_type:
            report.append(f"entity at {ent.span} has empty type")

    if inst.task is Task.RE:
        if inst.pair is None:
            report.append("RE instance missing entity pair")
        else:
            for k in inst.pair:
                if not 0 <= k < len(inst.entities):
                    report.append(f"pair index {k} out of range")
        if not inst.relation:
            report.append("RE instance missing relation")
    elif inst.pair is not None:
        report.append(f"{inst.task.value} instance carries an entity pair")

    if inst.task is Task.TC and not inst.topic:
        report.append("TC instance missing topic")
    if inst.task is Task.QA:
        if not inst.question:
            report.append("QA instance missing question")
        if not inst.answer:
            report.append("QA instance missing answer")

    if inst.provenance.is_augmented:
        if not inst.provenance.parent_id:
            report.append("augmented instance missing parent_id")
        elif known_ids is not None and inst.provenance.parent_id not in known_ids:
            report.append(f"unresolved parent '{inst.provenance.parent_id}'")
    return report


@dataclass
class Dataset:
    """An ordered collection of instances, indexable by id."""

    instances: list[TaskInstance] = field(default_factory=list)

    def __iter__(self) -> Iterator[TaskInstance]:
        return iter(self.instances)

    def __len__(self) -> int:
        return len(self.instances)

    def __getitem__(self, i: int) -> TaskInstance:
        return self.instances[i]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Dataset) and self.instances == other.instances

    def ids(self) -> set[str]:
        return {inst.id for inst in self.instances}

    def by_id(self, inst_id: str) -> TaskInstance:
        for inst in self.instances:
            if inst.id == inst_id:
                return inst
        raise KeyError(inst_id)

    def validate(self) -> dict[str, list[str]]:
        """Per-instance violation reports, keyed by id; empty dict if clean."""
        ids = self.ids()
        out: dict[str, list[str]] = {}
        for inst in self.instances:
            report = validate_instance(inst, known_ids=ids)
            if report:
                out[inst.id] = report
        return out
