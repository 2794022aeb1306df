"""Run configuration: dataclass, INI file loading, env overrides."""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from bioaug.errors import ConfigError
from bioaug.corpus.io import FORMATS

# Backend specs may be overridden from the environment so one config
# file can target mocks locally and a live endpoint elsewhere.
ENV_OVERRIDES = {
    "scorer": "BIOAUG_SCORER",
    "relativity_scorer": "BIOAUG_RELATIVITY_SCORER",
    "generator": "BIOAUG_GENERATOR",
    "extractor": "BIOAUG_EXTRACTOR",
    "agents": "BIOAUG_AGENTS",
}


@dataclass
class RunConfig:
    dataset: str = ""
    format: str = "canonical-jsonl"
    notions: str = ""
    output: str = ""
    report: str = ""
    cache_path: str = ""

    scorer: str = "mock:additive"
    relativity_scorer: str = "mock:additive"
    generator: str = "mock:identity"
    extractor: str = "mock:echo"
    agents: str = "mock:pass"

    n_keywords: int = 0          # 0 means the size-based default
    k_exemplars: int = 3
    sigma: float = 0.8
    max_iters: int = 5
    n_agents: int = 3
    similarity_threshold: float = 0.8
    max_rounds: int = 5
    proportion: float = 1.0
    seed: int = 0
    workers: int = 1

    extra: dict = field(default_factory=dict)

    def echo(self) -> dict:
        """Config as a flat record for reports."""
        out = {}
        for f in fields(self):
            if f.name == "extra":
                continue
            out[f.name] = getattr(self, f.name)
        return out


def validate_config(cfg: RunConfig) -> list[str]:
    """Collect every violation; an empty list means the config is usable."""
    problems = []
    if not cfg.dataset:
        problems.append("dataset path is required")
    elif not Path(cfg.dataset).exists():
        problems.append(f"dataset file not found: {cfg.dataset}")
    if cfg.format not in FORMATS:
        problems.append(f"unknown dataset format {cfg.format!r}")
    if cfg.notions and not Path(cfg.notions).exists():
        problems.append(f"notion table not found: {cfg.notions}")
    if not 0.0 <= cfg.proportion <= 1.0:
        problems.append(f"proportion must be in [0, 1], got {cfg.proportion}")
    if not 0.0 < cfg.sigma <= 1.0:
        problems.append(f"sigma must be in (0, 1], got {cfg.sigma}")
    if not 0.0 < cfg.similarity_threshold <= 1.0:
        problems.append("similarity threshold must be in (0, 1], got "
                        f"{cfg.similarity_threshold}")
    if cfg.n_keywords < 0:
        problems.append(f"keyword count must be >= 0, got {cfg.n_keywords}")
    if cfg.k_exemplars < 1:
        problems.append(f"exemplar count must be >= 1, got {cfg.k_exemplars}")
    if cfg.max_iters < 1:
        problems.append(f"max_iters must be >= 1, got {cfg.max_iters}")
    if cfg.max_rounds < 1:
        problems.append(f"max_rounds must be >= 1, got {cfg.max_rounds}")
    if cfg.n_agents < 2:
        problems.append(f"agent count must be >= 2, got {cfg.n_agents}")
    if cfg.workers < 1:
        problems.append(f"worker count must be >= 1, got {cfg.workers}")
    return problems


def _coerce(name: str, raw: str, target_type: type):
    try:
        if target_type is int:
            return int(raw)
        if target_type is float:
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"option {name!r} expects {target_type.__name__}, "
                          f"got {raw!r}")


def load_config(path: str | Path | None = None,
                overrides: dict | None = None) -> RunConfig:
    """Build a RunConfig from an INI file, explicit overrides, then env.

    Precedence, lowest to highest: dataclass defaults, [run] section of
    the file, explicit overrides (CLI flags), environment variables for
    backend specs.
    """
    cfg = RunConfig()
    known = {f.name: f.type for f in fields(RunConfig) if f.name != "extra"}
    types = {f.name: type(getattr(cfg, f.name)) for f in fields(RunConfig)
             if f.name != "extra"}

    if path is not None:
        parser = configparser.ConfigParser()
        read = parser.read(path, encoding="utf-8")
        if not read:
            raise ConfigError(f"config file not found: {path}")
        if not parser.has_section("run"):
            raise ConfigError(f"config file {path} has no [run] section")
        values = {}
        for name, raw in parser.items("run"):
            if name not in known:
                raise ConfigError(f"unknown config option {name!r}")
            values[name] = _coerce(name, raw, types[name])
        cfg = replace(cfg, **values)

    if overrides:
        clean = {k: v for k, v in overrides.items() if v is not None}
        unknown = set(clean) - set(known)
        if unknown:
            raise ConfigError(f"unknown config options: {sorted(unknown)}")
        cfg = replace(cfg, **clean)

    env_values = {}
    for name, env_var in ENV_OVERRIDES.items():
        value = os.environ.get(env_var)
        if value:
            env_values[name] = value
    if env_values:
        cfg = replace(cfg, **env_values)
    return cfg
