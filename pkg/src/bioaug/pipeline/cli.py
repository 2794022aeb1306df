"""Command line interface.

Five verbs, one per inspectable stage: augment (full pipeline),
attribute (maps and template only), debate (one pair through the review
loop), eval (metrics), prompts (rendered templates). Config errors exit
nonzero before any work starts.
"""

from __future__ import annotations

import json
import random
import sys

import click

from bioaug.errors import BioaugError, ConfigError
from bioaug.corpus.io import FORMATS, load_dataset, load_notions, write_dataset
from bioaug.attribution.stage import where_stage
from bioaug.backends.registry import make_agents, make_relativity_scorer, make_scorer
from bioaug.pipeline.config import load_config, validate_config
from bioaug.pipeline.metrics import compute_metrics
from bioaug.pipeline.run import augment_dataset
from bioaug.reflection.debate import run_debate
from bioaug.reflection.prompts import render_prompt

_CONFIG_EXIT = 2


@click.group()
def main() -> None:
    """Biomedical data augmentation with attribution masks and a review loop."""


def _fail(message: str, code: int = 1) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="INI config file with a [run] section.")
@click.option("--dataset", type=click.Path(), default=None)
@click.option("--format", "fmt", type=click.Choice(sorted(FORMATS)), default=None)
@click.option("--notions", type=click.Path(), default=None)
@click.option("--output", type=click.Path(), default=None)
@click.option("--report", "report_path", type=click.Path(), default=None)
@click.option("--cache-path", type=click.Path(), default=None)
@click.option("--scorer", default=None)
@click.option("--relativity-scorer", default=None)
@click.option("--generator", default=None)
@click.option("--extractor", default=None)
@click.option("--agents", default=None)
@click.option("--n-keywords", type=int, default=None)
@click.option("--k-exemplars", type=int, default=None)
@click.option("--sigma", type=float, default=None)
@click.option("--max-iters", type=int, default=None)
@click.option("--n-agents", type=int, default=None)
@click.option("--similarity-threshold", type=float, default=None)
@click.option("--max-rounds", type=int, default=None)
@click.option("--proportion", type=float, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=None)
def augment(config_path, fmt, report_path, **flags):
    """Augment a dataset and write the extended copy plus a run report."""
    overrides = dict(flags)
    if fmt is not None:
        overrides["format"] = fmt
    if report_path is not None:
        overrides["report"] = report_path
    try:
        cfg = load_config(config_path, overrides)
    except ConfigError as exc:
        _fail(str(exc), _CONFIG_EXIT)
    problems = validate_config(cfg)
    if problems:
        for p in problems:
            click.echo(f"config error: {p}", err=True)
        sys.exit(_CONFIG_EXIT)
    try:
        out, report = augment_dataset(cfg)
    except BioaugError as exc:
        _fail(str(exc))
    if cfg.output:
        write_dataset(out, cfg.output)
        click.echo(f"wrote {len(out)} instances to {cfg.output}")
    if cfg.report:
        with open(cfg.report, "w", encoding="utf-8") as fh:
            fh.write(report.dump())
    click.echo(report.to_text(), nl=False)


@main.command()
@click.option("--dataset", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(sorted(FORMATS)),
              default="canonical-jsonl")
@click.option("--notions", type=click.Path(exists=True), default=None)
@click.option("--scorer", default="mock:additive")
@click.option("--relativity-scorer", default="mock:additive")
@click.option("--n-keywords", type=int, default=None)
@click.option("--id", "instance_id", default=None,
              help="Single instance id; all instances when omitted.")
@click.option("--out", type=click.Path(), default=None,
              help="Write the JSON report here instead of stdout.")
def attribute(dataset, fmt, notions, scorer, relativity_scorer, n_keywords,
              instance_id, out):
    """Emit attribution maps, keyword sets and templates, no generation."""
    try:
        ds = load_dataset(dataset, fmt)
        table = load_notions(notions) if notions else {}
        task_scorer = make_scorer(scorer)
        rel_scorer = make_relativity_scorer(relativity_scorer)
        instances = ds.instances
        if instance_id is not None:
            try:
                instances = [ds.by_id(instance_id)]
            except KeyError:
                _fail(f"no instance with id {instance_id!r}")
        results = {}
        for inst in instances:
            where = where_stage(inst, table, task_scorer, rel_scorer,
                                n=n_keywords)
            results[inst.id] = {
                "lexicon": where.map_lexicon.to_report(),
                "relation": where.map_relation.to_report(),
                "keywords": list(where.keywords.indices),
                "template": where.template.render(),
                "flags": list(where.flags),
            }
    except BioaugError as exc:
        _fail(str(exc))
    payload = json.dumps(results, ensure_ascii=False, sort_keys=True, indent=2)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    else:
        click.echo(payload)


@main.command()
@click.option("--original", required=True)
@click.option("--augmented", required=True)
@click.option("--agents", "agents_spec", default="mock:pass")
@click.option("--sigma", type=float, default=0.8)
@click.option("--max-iters", type=int, default=5)
@click.option("--n-agents", type=int, default=3)
@click.option("--seed", type=int, default=0)
@click.option("--entity", "entities", multiple=True,
              help="Entity surface that must survive revision; repeatable.")
def debate(original, augmented, agents_spec, sigma, max_iters, n_agents, seed,
           entities):
    """Run one (original, augmented) pair through the review loop."""
    try:
        team = make_agents(agents_spec, n_agents)
        accepted, transcript = run_debate(
            original, augmented, team, sigma=sigma, max_iters=max_iters,
            rng=random.Random(seed), required_surfaces=list(entities))
    except BioaugError as exc:
        _fail(str(exc))
    click.echo(transcript.dump())
    click.echo(f"outcome: {'accepted' if accepted else 'exhausted'}", err=True)


@main.command("eval")
@click.option("--gold", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(sorted(FORMATS)),
              default="canonical-jsonl")
@click.option("--predictions", required=True, type=click.Path(exists=True))
@click.option("--task", required=True,
              type=click.Choice(["ner", "re", "tc", "qa"]))
@click.option("--negative-label", default="none")
def eval_cmd(gold, fmt, predictions, task, negative_label):
    """Score a prediction file against a gold dataset."""
    try:
        ds = load_dataset(gold, fmt)
        table = compute_metrics(ds, predictions, task,
                                negative_label=negative_label)
    except BioaugError as exc:
        _fail(str(exc))
    click.echo(json.dumps(table, ensure_ascii=False, sort_keys=True, indent=2))


@main.command()
@click.option("--template", "template_id", required=True)
@click.option("--var", "variables", multiple=True,
              help="name=value pair; repeatable.")
def prompts(template_id, variables):
    """Render a prompt template with the given variables."""
    values = {}
    for pair in variables:
        name, sep, value = pair.partition("=")
        if not sep:
            _fail(f"--var expects name=value, got {pair!r}", _CONFIG_EXIT)
        values[name] = value
    try:
        click.echo(render_prompt(template_id, values))
    except BioaugError as exc:
        _fail(str(exc), _CONFIG_EXIT)


if __name__ == "__main__":
    main()
