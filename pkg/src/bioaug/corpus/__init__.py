"""Canonical instance model, dataset ingestion and attribution targets."""

from bioaug.corpus.model import (
    Dataset,
    EntityMention,
    Provenance,
    Task,
    TaskInstance,
    Token,
    tokenize,
    validate_instance,
)
from bioaug.corpus.io import load_dataset, load_notions, write_dataset, FORMATS
from bioaug.corpus.targets import AttributionTarget, derive_attribution_target

__all__ = [
    "AttributionTarget",
    "Dataset",
    "EntityMention",
    "FORMATS",
    "Provenance",
    "Task",
    "TaskInstance",
    "Token",
    "derive_attribution_target",
    "load_dataset",
    "load_notions",
    "tokenize",
    "validate_instance",
    "write_dataset",
]
