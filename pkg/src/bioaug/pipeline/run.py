"""Run orchestration: subset selection, the per-instance chain, reporting.

The augmentation chain per instance is attribution, masking, exemplar
sampling, key-structure extraction, infill, then the debate. Failures
anywhere in the chain park the instance in the degenerate bucket; the
run itself never aborts over one instance.

Determinism contract: every random choice derives from the global seed
(subset selection) or from a per-instance seed hashed out of the global
seed and the instance id, so worker count and completion order cannot
change the output.
"""

from __future__ import annotations

import hashlib
import json
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from bioaug.errors import BioaugError, ConfigError
from bioaug.corpus.io import load_dataset, load_notions
from bioaug.corpus.model import Dataset, Task, TaskInstance, token_texts
from bioaug.attribution.scorers import MemoScorer
from bioaug.attribution.stage import where_stage
from bioaug.backends.cache import ResponseCache
from bioaug.backends.registry import (
    make_agents,
    make_extractor,
    make_generator,
    make_relativity_scorer,
    make_scorer,
)
from bioaug.generation.infill import AugCandidate, generate_candidate, project_labels
from bioaug.generation.sampling import sample_similar
from bioaug.generation.structure import extract_key_structure
from bioaug.pipeline.config import RunConfig, validate_config
from bioaug.reflection.debate import run_debate


@dataclass
class InstanceOutcome:
    instance_id: str
    status: str  # accepted | exhausted | degenerate
    augmented: TaskInstance | None = None
    reason: str = ""
    flags: tuple[str, ...] = ()
    timings: dict = field(default_factory=dict)


@dataclass
class RunReport:
    attempted: int
    accepted: int
    exhausted: int
    degenerate: int
    degenerate_detail: list[tuple[str, str]]
    flags: dict
    config: dict
    cache: dict | None = None
    timings: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        """Machine-readable report; wall-clock timings stay out so equal
        runs serialize to equal bytes."""
        return {
            "counts": {
                "attempted": self.attempted,
                "accepted": self.accepted,
                "exhausted": self.exhausted,
                "degenerate": self.degenerate,
            },
            "degenerate": [list(d) for d in self.degenerate_detail],
            "flags": dict(sorted(self.flags.items())),
            "config": {k: self.config[k] for k in sorted(self.config)},
            "cache": self.cache,
        }

    def dump(self) -> str:
        return json.dumps(self.to_record(), ensure_ascii=False, sort_keys=True,
                          indent=2) + "\n"

    def to_text(self) -> str:
        lines = [
            f"attempted  {self.attempted}",
            f"accepted   {self.accepted}",
            f"exhausted  {self.exhausted}",
            f"degenerate {self.degenerate}",
        ]
        for inst_id, reason in self.degenerate_detail:
            lines.append(f"  {inst_id}: {reason}")
        if self.flags:
            lines.append("flags: " + ", ".join(
                f"{k}={v}" for k, v in sorted(self.flags.items())))
        if self.cache:
            lines.append(f"cache: {self.cache['hits']} hits / "
                         f"{self.cache['misses']} misses")
        for stage, seconds in sorted(self.timings.items()):
            lines.append(f"time[{stage}] {seconds:.3f}s")
        return "\n".join(lines) + "\n"


def instance_seed(global_seed: int, instance_id: str) -> int:
    digest = hashlib.sha256(f"{global_seed}:{instance_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def select_subset(size: int, proportion: float, seed: int) -> list[int]:
    """Seeded shuffle, then the first round(p*size) positions, in order."""
    count = int(proportion * size + 0.5)
    order = list(range(size))
    random.Random(seed).shuffle(order)
    return sorted(order[:count])


def _sample_exemplars(dataset: Dataset, inst: TaskInstance, k: int,
                      seed: int) -> list[str]:
    """Task-appropriate exemplar pool; an empty pool is not an error
    except for relation instances, which require structural peers."""
    if inst.task is Task.RE:
        return sample_similar(dataset, inst.e1.surface, inst.e2.surface,
                              inst.relation, k, seed, exclude_id=inst.id)
    if inst.task is Task.TC:
        pool = [x for x in dataset
                if x.task is Task.TC and x.id != inst.id and x.topic == inst.topic]
    elif inst.task is Task.NER:
        types = {e.entity_type for e in inst.entities}
        pool = [x for x in dataset
                if x.task is Task.NER and x.id != inst.id
                and types & {e.entity_type for e in x.entities}]
    else:
        pool = [x for x in dataset if x.task is inst.task and x.id != inst.id]
    if not pool:
        pool = [x for x in dataset if x.task is inst.task and x.id != inst.id]
    rng = random.Random(seed)
    chosen = rng.sample(pool, min(k, len(pool)))
    return [x.text for x in chosen]


def _augment_one(inst: TaskInstance, dataset: Dataset, notions: dict,
                 cfg: RunConfig, scorers: tuple, generator, extractor,
                 agents: list) -> InstanceOutcome:
    seed = instance_seed(cfg.seed, inst.id)
    flags: list[str] = []
    timings: dict[str, float] = {}
    task_scorer, rel_scorer = scorers
    try:
        t0 = time.perf_counter()
        where = where_stage(inst, notions, task_scorer, rel_scorer,
                            n=cfg.n_keywords or None)
        timings["where"] = time.perf_counter() - t0
        flags.extend(where.flags)

        t0 = time.perf_counter()
        exemplars = _sample_exemplars(dataset, inst, cfg.k_exemplars, seed)
        if exemplars:
            structure = extract_key_structure(
                inst.text, exemplars, where.target.restriction_text,
                extractor, threshold=cfg.similarity_threshold,
                max_rounds=cfg.max_rounds)
            structure_text = structure.text
            if structure.best_effort:
                flags.append("structure-best-effort")
        else:
            structure_text = ""
            flags.append("no-exemplars")
        timings["structure"] = time.perf_counter() - t0

        t0 = time.perf_counter()
        cand = generate_candidate(
            where.template, where.target.restriction_text, structure_text,
            generator, seed, parent_id=inst.id,
            meta={"n": where.keywords.n, "k": cfg.k_exemplars})
        if cand.trivial:
            flags.append("trivial-candidate")
        timings["generate"] = time.perf_counter() - t0

        t0 = time.perf_counter()
        surfaces = [e.surface for e in where.template.entities]
        accepted, transcript = run_debate(
            inst.text, cand.text, agents, sigma=cfg.sigma,
            max_iters=cfg.max_iters, rng=random.Random(seed),
            required_surfaces=surfaces)
        timings["debate"] = time.perf_counter() - t0
        if not accepted:
            return InstanceOutcome(inst.id, "exhausted", flags=tuple(flags),
                                   timings=timings)

        if transcript.final == cand.text:
            final_cand = cand
        else:
            final_cand = AugCandidate(
                tokens=tuple(token_texts(transcript.final)),
                entity_spans=None, parent_id=inst.id, meta=cand.meta)
        augmented = project_labels(inst, final_cand)
        return InstanceOutcome(inst.id, "accepted", augmented=augmented,
                               flags=tuple(flags), timings=timings)
    except BioaugError as exc:
        return InstanceOutcome(inst.id, "degenerate",
                               reason=f"{type(exc).__name__}: {exc}",
                               flags=tuple(flags), timings=timings)


def augment_dataset(cfg: RunConfig) -> tuple[Dataset, RunReport]:
    """Run the full chain over a seeded proportion of the dataset.

    Returns the input dataset with accepted augmentations appended in
    parent order, plus the run report. Config problems abort before any
    work happens.
    """
    problems = validate_config(cfg)
    if problems:
        raise ConfigError("; ".join(problems))

    dataset = load_dataset(cfg.dataset, cfg.format)
    notions = load_notions(cfg.notions) if cfg.notions else {}
    cache = ResponseCache(cfg.cache_path) if cfg.cache_path else None

    task_scorer = MemoScorer(make_scorer(cfg.scorer, cache=cache))
    rel_scorer = MemoScorer(make_relativity_scorer(cfg.relativity_scorer,
                                                   cache=cache))
    generator = make_generator(cfg.generator, cache=cache)
    extractor = make_extractor(cfg.extractor, cache=cache)
    agents = make_agents(cfg.agents, cfg.n_agents, cache=cache)

    backends = [task_scorer, rel_scorer, generator, extractor, *agents]
    workers = cfg.workers
    if any(not getattr(b, "concurrency_safe", True) for b in backends):
        workers = 1

    chosen = select_subset(len(dataset), cfg.proportion, cfg.seed)
    picked = [dataset[i] for i in chosen]

    if workers > 1 and picked:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(
                lambda inst: _augment_one(inst, dataset, notions, cfg,
                                          (task_scorer, rel_scorer),
                                          generator, extractor, agents),
                picked))
    else:
        outcomes = [_augment_one(inst, dataset, notions, cfg,
                                 (task_scorer, rel_scorer),
                                 generator, extractor, agents)
                    for inst in picked]

    accepted = [o.augmented for o in outcomes if o.status == "accepted"]
    flag_counts: dict[str, int] = {}
    timings: dict[str, float] = {}
    for o in outcomes:
        for flag in o.flags:
            flag_counts[flag] = flag_counts.get(flag, 0) + 1
        for stage, seconds in o.timings.items():
            timings[stage] = timings.get(stage, 0.0) + seconds

    report = RunReport(
        attempted=len(outcomes),
        accepted=sum(1 for o in outcomes if o.status == "accepted"),
        exhausted=sum(1 for o in outcomes if o.status == "exhausted"),
        degenerate=sum(1 for o in outcomes if o.status == "degenerate"),
        degenerate_detail=[(o.instance_id, o.reason) for o in outcomes
                           if o.status == "degenerate"],
        flags=flag_counts,
        config=cfg.echo(),
        cache=cache.stats() if cache else None,
        timings=timings,
    )
    out = Dataset(list(dataset.instances) + accepted)
    if cache:
        cache.close()
    return out, report
