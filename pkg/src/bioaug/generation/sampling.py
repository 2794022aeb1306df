"""Exemplar sampling for the key-structure loop."""

from __future__ import annotations

import random

from bioaug.errors import NoExemplarsError
from bioaug.corpus.model import Dataset, Task, TaskInstance


def _is_exact(inst: TaskInstance, e1_surface: str, e2_surface: str) -> bool:
    return (inst.e1 is not None and inst.e2 is not None
            and inst.e1.surface == e1_surface and inst.e2.surface == e2_surface)


def sample_similar(dataset: Dataset, e1_surface: str, e2_surface: str,
                   relation: str, k: int, rng_seed: int,
                   exclude_id: str | None = None) -> list[str]:
    """Pick up to k same-relation sentences, preferring exact pair matches.

    Tier one holds sentences whose subject and object surfaces both
    match; tier two holds any other sentence with the same relation.
    Sampling within a tier is seeded-uniform, so a fixed seed fixes the
    result. Raises when the relation never occurs outside the excluded
    instance.
    """
    if k < 1:
        raise ValueError(f"exemplar count must be >= 1, got {k}")
    same_relation = [inst for inst in dataset
                     if inst.task is Task.RE and inst.relation == relation
                     and inst.id != exclude_id]
    if not same_relation:
        raise NoExemplarsError("no structural exemplars")
    exact = [i for i in same_relation if _is_exact(i, e1_surface, e2_surface)]
    rest = [i for i in same_relation if not _is_exact(i, e1_surface, e2_surface)]
    rng = random.Random(rng_seed)
    chosen = rng.sample(exact, min(k, len(exact)))
    if len(chosen) < k and rest:
        chosen.extend(rng.sample(rest, min(k - len(chosen), len(rest))))
    return [inst.text for inst in chosen]
