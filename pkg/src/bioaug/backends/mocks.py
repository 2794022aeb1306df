"""Deterministic in-process backends.

These define the behavioral contracts the HTTP backends and any real
serving process must honor, and they make the whole pipeline runnable
and testable without a model in sight.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Sequence

from bioaug.attribution.scorers import INFERENCE_RELATIVITY, TASK_LOGIT
from bioaug.attribution.template import MaskedTemplate


# ---------------------------------------------------------------------------
# Scorers


class InteractionScorer:
    """Additive per-token weights plus bonuses for co-present token pairs.

    Covers the whole mock family: plain additive (no pairs), pairwise
    bonus, and constant (offset only). Pure and deterministic.
    """

    def __init__(self, weights: dict[str, float] | None = None,
                 default_weight: float = 0.0,
                 pair_bonuses: dict[tuple[str, str], float] | None = None,
                 offset: float = 0.0, kind: str = TASK_LOGIT):
        self.weights = dict(weights or {})
        self.default_weight = default_weight
        self.pair_bonuses = dict(pair_bonuses or {})
        self.offset = offset
        self.kind = kind
        self.concurrency_safe = True

    def score(self, tokens: Sequence[str], restriction: str | None = None) -> float:
        total = self.offset
        present = set(tokens)
        for tok in tokens:
            total += self.weights.get(tok, self.default_weight)
        for (a, b), bonus in self.pair_bonuses.items():
            if a in present and b in present:
                total += bonus
        return total


def additive_scorer(weight: float = 1.0, kind: str = TASK_LOGIT) -> InteractionScorer:
    """One fixed weight per token, no interactions."""
    return InteractionScorer(default_weight=weight, kind=kind)


def constant_scorer(value: float = 0.0, kind: str = TASK_LOGIT) -> InteractionScorer:
    return InteractionScorer(offset=value, kind=kind)


class HashScorer:
    """Pseudo-random but perfectly reproducible scorer in [0, 1)."""

    def __init__(self, seed: int = 0, kind: str = TASK_LOGIT):
        self.seed = seed
        self.kind = kind
        self.concurrency_safe = True

    def score(self, tokens: Sequence[str], restriction: str | None = None) -> float:
        h = hashlib.sha256()
        h.update(str(self.seed).encode())
        h.update(b"\x00")
        for tok in tokens:
            h.update(tok.encode("utf-8"))
            h.update(b"\x1f")
        if restriction is not None:
            h.update(restriction.encode("utf-8"))
        return int.from_bytes(h.digest()[:8], "big") / 2 ** 64


class RelationTriggerScorer:
    """Relativity mock: a bonus fires when the trigger word and every
    entity token appear together, mimicking a sentence that still
    expresses the relation."""

    def __init__(self, trigger: str, entity_tokens: Sequence[str],
                 bonus: float = 5.0, per_token: float = 1.0):
        self.trigger = trigger
        self.entity_tokens = tuple(entity_tokens)
        self.bonus = bonus
        self.per_token = per_token
        self.kind = INFERENCE_RELATIVITY
        self.concurrency_safe = True

    def score(self, tokens: Sequence[str], restriction: str | None = None) -> float:
        present = set(tokens)
        total = self.per_token * len(tokens)
        if self.trigger in present and all(t in present for t in self.entity_tokens):
            total += self.bonus
        return total


class CountingScorer:
    """Wraps another scorer and counts raw backend invocations."""

    def __init__(self, inner):
        self.inner = inner
        self.kind = inner.kind
        self.concurrency_safe = getattr(inner, "concurrency_safe", True)
        self.calls = 0

    def score(self, tokens: Sequence[str], restriction: str | None = None) -> float:
        self.calls += 1
        return self.inner.score(tokens, restriction)


class FailingScorer:
    """Raises on every call; exercises the error-wrapping path."""

    kind = TASK_LOGIT
    concurrency_safe = True

    def score(self, tokens: Sequence[str], restriction: str | None = None) -> float:
        raise RuntimeError("scorer backend unavailable")


# ---------------------------------------------------------------------------
# Infill generators


class IdentityInfiller:
    """Restores the source tokens at every masked slot.

    This is the perfectly trained recovery decoder: its output equals
    the parent sentence exactly.
    """

    concurrency_safe = True

    def infill(self, template: MaskedTemplate, restriction_text: str,
               key_structure: str, seed: int) -> list[str]:
        return list(template.source_tokens)


class SynonymInfiller:
    """Fills each masked slot with a table lookup of the source token."""

    concurrency_safe = True

    def __init__(self, table: dict[str, str]):
        self.table = dict(table)

    def infill(self, template: MaskedTemplate, restriction_text: str,
               key_structure: str, seed: int) -> list[str]:
        out = []
        for masked, source in zip(template.masked_tokens, template.source_tokens):
            if masked == template.sentinel:
                out.append(self.table.get(source, source))
            else:
                out.append(source)
        return out


class MarkerEmittingInfiller:
    """Identity filling, but wraps each entity in inline type markers."""

    concurrency_safe = True

    def infill(self, template: MaskedTemplate, restriction_text: str,
               key_structure: str, seed: int) -> list[str]:
        starts = {e.span[0]: e for e in template.entities}
        ends = {e.span[1]: e for e in template.entities}
        out: list[str] = []
        for i, tok in enumerate(template.source_tokens):
            if i in starts:
                out.append(f"<s:{starts[i].entity_type}>")
            out.append(tok)
            if i in ends:
                out.append(f"</s:{ends[i].entity_type}>")
        return out


class SentinelLeakInfiller:
    """Broken on purpose: returns the template with masks still in it."""

    concurrency_safe = True

    def infill(self, template: MaskedTemplate, restriction_text: str,
               key_structure: str, seed: int) -> list[str]:
        return list(template.masked_tokens)


class EntityDropInfiller:
    """Broken on purpose: loses the last marked entity's tokens."""

    concurrency_safe = True

    def infill(self, template: MaskedTemplate, restriction_text: str,
               key_structure: str, seed: int) -> list[str]:
        if not template.entities:
            return list(template.source_tokens)
        gone = set(template.entities[-1].indices())
        return [t for i, t in enumerate(template.source_tokens) if i not in gone]


# ---------------------------------------------------------------------------
# Key-structure extractors


class EchoExtractor:
    """Round 1 returns the target sentence verbatim."""

    concurrency_safe = True

    def __init__(self, suffix: str = ""):
        self.suffix = suffix
        self.calls = 0

    def propose(self, sentences: Sequence[str],
                failing_pairs: Sequence[tuple[str, float]] | None = None) -> str:
        self.calls += 1
        target = sentences[0]
        return f"{target}{self.suffix}" if self.suffix else target


class ScriptedExtractor:
    """Plays back a fixed list of proposals, one per round."""

    concurrency_safe = True

    def __init__(self, proposals: Sequence[str]):
        self.proposals = list(proposals)
        self.calls = 0
        self.seen_failing: list[list[tuple[str, float]]] = []

    def propose(self, sentences: Sequence[str],
                failing_pairs: Sequence[tuple[str, float]] | None = None) -> str:
        self.seen_failing.append(list(failing_pairs or []))
        proposal = self.proposals[min(self.calls, len(self.proposals) - 1)]
        self.calls += 1
        return proposal


class FailingExtractor:
    concurrency_safe = True

    def propose(self, sentences: Sequence[str],
                failing_pairs: Sequence[tuple[str, float]] | None = None) -> str:
        raise RuntimeError("extractor backend unavailable")


# ---------------------------------------------------------------------------
# Debate agents


@dataclass
class TeamState:
    """Shared by one scripted team so grades can follow an iteration schedule.

    The judge's review request happens exactly once per iteration, so it
    doubles as the iteration clock.
    """

    iteration: int = 0
    grade_schedule: tuple[int, ...] = (100,)
    review_line: str = "REVIEW: NONE"
    aspect_verdicts: dict[str, str] = field(default_factory=dict)
    revise_text: str | None = None

    def current_grade(self) -> int:
        idx = min(self.iteration - 1, len(self.grade_schedule) - 1)
        return self.grade_schedule[max(idx, 0)]


class ScriptedAgent:
    """Phase-aware scripted debater.

    The phase is recognized from the answer-format block inside the
    prompt, which is how a live model would learn it too.
    """

    def __init__(self, agent_id: str, state: TeamState):
        self.id = agent_id
        self.state = state
        self.concurrency_safe = True
        self.chat_log: list[str] = []

    def _wrap(self, *lines: str) -> str:
        return "<<<ANSWER\n" + "\n".join(lines) + "\n>>>"

    def chat(self, prompt: str, seed: int) -> str:
        self.chat_log.append(prompt)
        if "REVISED:" in prompt:
            text = self.state.revise_text
            if text is None:
                text = _augmented_from_reviews(prompt)
            return self._wrap(f"REVISED: {text}")
        if "ASPECT:" in prompt:
            lines = []
            for aspect in ("word_definition", "word_similarity",
                           "syntax_correctness", "usage_example"):
                verdict = self.state.aspect_verdicts.get(aspect, "reasonable")
                lines.append(f"ASPECT: {aspect} ||| {verdict} ||| scripted rationale")
            return self._wrap(*lines)
        if "GRADE:" in prompt:
            return self._wrap(f"GRADE: {self.state.current_grade()}/100")
        if "REVIEW:" in prompt:
            self.state.iteration += 1
            return self._wrap(self.state.review_line)
        return self._wrap("REVIEW: NONE")


def _augmented_from_reviews(prompt: str) -> str:
    """Default revision: keep the current augmented sentence unchanged."""
    marker = "Current augmented sentence: "
    for line in prompt.splitlines():
        if line.startswith(marker):
            return line[len(marker):]
    return ""


def scripted_team(n: int, grade_schedule: Sequence[int] = (100,),
                  review_line: str = "REVIEW: NONE",
                  aspect_verdicts: dict[str, str] | None = None,
                  revise_text: str | None = None,
                  ) -> tuple[list[ScriptedAgent], TeamState]:
    """Build n agents sharing one schedule state."""
    state = TeamState(grade_schedule=tuple(grade_schedule),
                      review_line=review_line,
                      aspect_verdicts=dict(aspect_verdicts or {}),
                      revise_text=revise_text)
    return [ScriptedAgent(f"agent-{i}", state) for i in range(n)], state


class GarbageAgent:
    """Never produces a parsable answer."""

    def __init__(self, agent_id: str = "garbage"):
        self.id = agent_id
        self.concurrency_safe = True

    def chat(self, prompt: str, seed: int) -> str:
        return "I would rather talk about something else."


class FailingAgent:
    def __init__(self, agent_id: str = "failing"):
        self.id = agent_id
        self.concurrency_safe = True

    def chat(self, prompt: str, seed: int) -> str:
        raise RuntimeError("agent backend unavailable")


class SerialOnlyAgent(ScriptedAgent):
    """Scripted agent that declares it cannot take concurrent requests."""

    def __init__(self, agent_id: str, state: TeamState):
        super().__init__(agent_id, state)
        self.concurrency_safe = False
