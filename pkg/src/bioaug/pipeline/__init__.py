"""Orchestration: config, metrics, the augmentation run, and the CLI."""

from bioaug.pipeline.config import ENV_OVERRIDES, RunConfig, load_config, validate_config
from bioaug.pipeline.metrics import (
    answer_accuracy,
    average_micro_f1,
    compute_metrics,
    entity_f1,
    f1_from_counts,
    load_predictions,
    relation_micro_f1,
)
from bioaug.pipeline.run import (
    InstanceOutcome,
    RunReport,
    augment_dataset,
    instance_seed,
    select_subset,
)

__all__ = [
    "ENV_OVERRIDES",
    "InstanceOutcome",
    "RunConfig",
    "RunReport",
    "answer_accuracy",
    "augment_dataset",
    "average_micro_f1",
    "compute_metrics",
    "entity_f1",
    "f1_from_counts",
    "instance_seed",
    "load_config",
    "load_predictions",
    "relation_micro_f1",
    "select_subset",
    "validate_config",
]
