"""Backend construction from configuration strings.

A backend spec is either an http(s) URL or a "mock:<name>[:arg]" tag.
Mocks are listed here so configs, tests and the CLI share one naming
scheme.
"""

from __future__ import annotations

from bioaug.errors import ConfigError
from bioaug.attribution.scorers import INFERENCE_RELATIVITY, TASK_LOGIT
from bioaug.backends import mocks
from bioaug.backends.cache import (
    CachedAgent,
    CachedExtractor,
    CachedGenerator,
    CachedScorer,
    ResponseCache,
)
from bioaug.backends.http import HttpAgent, HttpExtractor, HttpGenerator, HttpScorer


def _is_url(spec: str) -> bool:
    return spec.startswith("http://") or spec.startswith("https://")


def _mock_parts(spec: str) -> list[str]:
    if not spec.startswith("mock:"):
        raise ConfigError(f"backend spec must be a URL or mock:<name>, got {spec!r}")
    return spec.split(":")[1:]


def make_scorer(spec: str, kind: str = TASK_LOGIT,
                cache: ResponseCache | None = None):
    if _is_url(spec):
        scorer = HttpScorer(spec, kind=kind)
        if cache is not None:
            return CachedScorer(scorer, cache, backend_id=f"{spec}#{kind}")
        return scorer
    parts = _mock_parts(spec)
    name = parts[0]
    if name == "additive":
        weight = float(parts[1]) if len(parts) > 1 else 1.0
        return mocks.additive_scorer(weight, kind=kind)
    if name == "constant":
        value = float(parts[1]) if len(parts) > 1 else 0.0
        return mocks.constant_scorer(value, kind=kind)
    if name == "hash":
        seed = int(parts[1]) if len(parts) > 1 else 0
        return mocks.HashScorer(seed, kind=kind)
    raise ConfigError(f"unknown scorer mock {name!r}")


def make_relativity_scorer(spec: str, cache: ResponseCache | None = None):
    return make_scorer(spec, kind=INFERENCE_RELATIVITY, cache=cache)


def make_generator(spec: str, cache: ResponseCache | None = None):
    if _is_url(spec):
        gen = HttpGenerator(spec)
        if cache is not None:
            return CachedGenerator(gen, cache, backend_id=spec)
        return gen
    parts = _mock_parts(spec)
    name = parts[0]
    if name == "identity":
        return mocks.IdentityInfiller()
    if name == "markers":
        return mocks.MarkerEmittingInfiller()
    if name == "synonym":
        table = {}
        for pair in parts[1:]:
            src, _, dst = pair.partition("=")
            if dst:
                table[src] = dst
        return mocks.SynonymInfiller(table)
    raise ConfigError(f"unknown generator mock {name!r}")


def make_extractor(spec: str, cache: ResponseCache | None = None):
    if _is_url(spec):
        ex = HttpExtractor(spec)
        if cache is not None:
            return CachedExtractor(ex, cache, backend_id=spec)
        return ex
    parts = _mock_parts(spec)
    name = parts[0]
    if name == "echo":
        return mocks.EchoExtractor()
    raise ConfigError(f"unknown extractor mock {name!r}")


def make_agents(spec: str, n: int, cache: ResponseCache | None = None) -> list:
    if _is_url(spec):
        agents = [HttpAgent(spec, agent_id=f"agent-{i}") for i in range(n)]
        if cache is not None:
            return [CachedAgent(a, cache) for a in agents]
        return agents
    parts = _mock_parts(spec)
    name = parts[0]
    if name == "pass":
        team, _ = mocks.scripted_team(n, grade_schedule=(100,))
        return team
    if name == "strict":
        # Grades climb across iterations; useful for exercising the loop.
        team, _ = mocks.scripted_team(n, grade_schedule=(50, 70, 90, 100))
        return team
    raise ConfigError(f"unknown agent mock {name!r}")
