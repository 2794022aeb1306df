"""Multi-agent debate over (original, augmented) sentence pairs.

Each iteration draws a judge at random, has the judge name the
discrepancies between the two sentences, fans the first discrepancy out
to every other agent for a four-aspect elaboration, lets the judge
revise the augmented sentence, and collects one grade per non-judge.
The mean grade is the acceptance score; the loop continues while it
stays at or below the threshold and the iteration budget lasts.

Agents answer inside a fenced block with line tags, and every parse
gets one automatic re-prompt before giving up.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Sequence

from bioaug.errors import AgentResponseError, BackendError, DebateProtocolError
from bioaug.reflection.agents import AgentBackend
from bioaug.reflection.prompts import render_prompt

ASPECTS = ("word_definition", "word_similarity", "syntax_correctness",
           "usage_example")
DEFAULT_SIGMA = 0.8
DEFAULT_MAX_ITERS = 5

ANSWER_OPEN = "<<<ANSWER"
ANSWER_CLOSE = ">>>"
FIELD_SEP = " ||| "

REVIEW_FORMAT = (
    "Reply with exactly one fenced block:\n"
    f"{ANSWER_OPEN}\n"
    f"REVIEW: <fragment from the original>{FIELD_SEP}<fragment from the augmented>"
    f"{FIELD_SEP}<where the change occurs>\n"
    f"{ANSWER_CLOSE}\n"
    "Write one REVIEW line per discrepancy, greatest discrepancy first. "
    "If the two sentences are identical, write the single line: REVIEW: NONE"
)

REVISE_FORMAT = (
    "Reply with exactly one fenced block:\n"
    f"{ANSWER_OPEN}\n"
    "REVISED: <the full revised augmented sentence>\n"
    f"{ANSWER_CLOSE}"
)

GRADE_FORMAT = (
    "Reply with exactly one fenced block:\n"
    f"{ANSWER_OPEN}\n"
    "GRADE: <integer between 0 and 100>/100\n"
    f"{ANSWER_CLOSE}"
)

_REPROMPT_SUFFIX = (
    "\n\nYour previous reply could not be parsed. "
    "Reply again following the Required Answer Format exactly."
)


@dataclass(frozen=True)
class DiscrepancyReview:
    """One judged difference: what changed, into what, and where."""

    fragment_original: str
    fragment_augmented: str
    locus: str


@dataclass(frozen=True)
class AspectReview:
    aspect: str
    verdict: str
    rationale: str
    reviewer_id: str


@dataclass(frozen=True)
class Grade:
    value: float
    grader_id: str
    iteration: int


@dataclass(frozen=True)
class IterationRecord:
    index: int
    judge_id: str
    reviews: tuple[DiscrepancyReview, ...]
    review_warnings: int
    aspect_reviews: tuple[tuple[AspectReview, ...], ...]
    revised: str
    revision_noop: bool
    grades: tuple[Grade, ...]
    acceptance: float


@dataclass
class DebateTranscript:
    """Full audit record of one debate."""

    original: str
    augmented_initial: str
    sigma: float
    iterations: list[IterationRecord] = field(default_factory=list)
    outcome: str = "exhausted"
    final: str = ""

    def to_record(self) -> dict:
        return {
            "original": self.original,
            "augmented_initial": self.augmented_initial,
            "sigma": self.sigma,
            "outcome": self.outcome,
            "final": self.final,
            "iterations": [
                {
                    "index": it.index,
                    "judge_id": it.judge_id,
                    "reviews": [
                        [r.fragment_original, r.fragment_augmented, r.locus]
                        for r in it.reviews
                    ],
                    "review_warnings": it.review_warnings,
                    "aspect_reviews": [
                        [
                            {"aspect": a.aspect, "verdict": a.verdict,
                             "rationale": a.rationale, "reviewer_id": a.reviewer_id}
                            for a in review_set
                        ]
                        for review_set in it.aspect_reviews
                    ],
                    "revised": it.revised,
                    "revision_noop": it.revision_noop,
                    "grades": [
                        {"value": g.value, "grader_id": g.grader_id,
                         "iteration": g.iteration}
                        for g in it.grades
                    ],
                    "acceptance": it.acceptance,
                }
                for it in self.iterations
            ],
        }

    def dump(self) -> str:
        return json.dumps(self.to_record(), ensure_ascii=False, sort_keys=True,
                          indent=2)


def select_judge(agents: Sequence[AgentBackend], rng: random.Random) -> int:
    """Uniform seeded draw of the judge's index."""
    if len(agents) < 2:
        raise DebateProtocolError(
            "debate requires a judge and at least one reviewer")
    return rng.randrange(len(agents))


def answer_lines(text: str) -> list[str] | None:
    """Lines inside the fenced answer block, or None when there is no block."""
    lines = text.splitlines()
    try:
        start = next(i for i, ln in enumerate(lines)
                     if ln.strip() == ANSWER_OPEN)
    except StopIteration:
        return None
    body = []
    for ln in lines[start + 1:]:
        if ln.strip() == ANSWER_CLOSE:
            return body
        body.append(ln)
    return None


def _chat(agent: AgentBackend, prompt: str, seed: int) -> str:
    try:
        return agent.chat(prompt, seed)
    except BackendError:
        raise
    except Exception as exc:
        raise BackendError(f"agent {agent.id} failed: {exc}",
                           retriable=True) from exc


def _ask_with_retry(agent, prompt, seed, parse):
    """Call, parse, and on a parse miss re-prompt exactly once."""
    response = _chat(agent, prompt, seed)
    try:
        return parse(response)
    except AgentResponseError:
        response = _chat(agent, prompt + _REPROMPT_SUFFIX, seed + 1)
        return parse(response)


def _parse_reviews(text: str, s: str, s_star: str,
                   ) -> tuple[list[DiscrepancyReview], int]:
    lines = answer_lines(text)
    if lines is None:
        raise AgentResponseError("no fenced answer block in review reply")
    reviews: list[DiscrepancyReview] = []
    warnings = 0
    saw_tag = False
    for ln in lines:
        ln = ln.strip()
        if not ln.startswith("REVIEW:"):
            continue
        saw_tag = True
        body = ln[len("REVIEW:"):].strip()
        if body == "NONE":
            continue
        parts = body.split(FIELD_SEP)
        if len(parts) != 3 or not all(p.strip() for p in parts):
            warnings += 1
            continue
        frag_s, frag_star, locus = (p.strip() for p in parts)
        if (frag_s.casefold() not in s.casefold()
                or frag_star.casefold() not in s_star.casefold()):
            warnings += 1
            continue
        reviews.append(DiscrepancyReview(frag_s, frag_star, locus))
    if not saw_tag:
        raise AgentResponseError("review reply contains no REVIEW lines")
    return reviews, warnings


def review_discrepancies(judge: AgentBackend, s: str, s_star: str,
                         seed: int = 0) -> tuple[list[DiscrepancyReview], int]:
    """Ask the judge what differs between the two sentences.

    Identical sentences short-circuit to an empty review list. Malformed
    or non-substring review lines are dropped and counted as warnings.
    """
    if s == s_star:
        return [], 0
    topic = (f"the greatest discrepancies between the original sentence "
             f"'{s}' and the augmented sentence '{s_star}'")
    prompt = render_prompt("debate_initial",
                           {"topic": topic, "answer_format": REVIEW_FORMAT})
    return _ask_with_retry(judge, prompt, seed,
                           lambda text: _parse_reviews(text, s, s_star))


def aspect_answer_format(discrepancy: DiscrepancyReview) -> str:
    return (
        f"The amendment under review replaces '{discrepancy.fragment_original}' "
        f"with '{discrepancy.fragment_augmented}' ({discrepancy.locus}). "
        "Judge whether this amendment is in reason from each aspect.\n"
        "Reply with exactly one fenced block of four lines:\n"
        f"{ANSWER_OPEN}\n"
        + "\n".join(
            f"ASPECT: {a}{FIELD_SEP}<reasonable|unreasonable>{FIELD_SEP}<rationale>"
            for a in ASPECTS)
        + f"\n{ANSWER_CLOSE}"
    )


def _parse_aspects(text: str, reviewer_id: str) -> list[AspectReview]:
    lines = answer_lines(text)
    if lines is None:
        raise AgentResponseError("no fenced answer block in aspect reply")
    found: dict[str, AspectReview] = {}
    for ln in lines:
        ln = ln.strip()
        if not ln.startswith("ASPECT:"):
            continue
        parts = ln[len("ASPECT:"):].strip().split(FIELD_SEP)
        if len(parts) != 3:
            continue
        aspect, verdict, rationale = (p.strip() for p in parts)
        if aspect in ASPECTS and verdict in ("reasonable", "unreasonable"):
            found.setdefault(aspect, AspectReview(aspect, verdict, rationale,
                                                  reviewer_id))
    for aspect in ASPECTS:
        if aspect not in found:
            raise AgentResponseError(f"aspect missing from reply: {aspect}")
    return [found[a] for a in ASPECTS]


def elaborate(reviewer: AgentBackend, discrepancy: DiscrepancyReview,
              s: str, s_star: str, seed: int = 0) -> list[AspectReview]:
    """One reviewer judges the amendment from all four aspects."""
    prompt = render_prompt("distinguish", {
        "original": s,
        "augmented": s_star,
        "answer_format": aspect_answer_format(discrepancy),
    })
    return _ask_with_retry(reviewer, prompt, seed,
                           lambda text: _parse_aspects(text, reviewer.id))


def _parse_revision(text: str) -> str:
    lines = answer_lines(text)
    if lines is None:
        raise AgentResponseError("no fenced answer block in revision reply")
    for ln in lines:
        ln = ln.strip()
        if ln.startswith("REVISED:"):
            revised = ln[len("REVISED:"):].strip()
            if revised:
                return revised
    raise AgentResponseError("revision reply contains no REVISED line")


def _format_reviews(s: str, s_star: str,
                    aspect_reviews: Sequence[Sequence[AspectReview]]) -> str:
    parts = [f"Original sentence: {s}", f"Current augmented sentence: {s_star}"]
    for review_set in aspect_reviews:
        for a in review_set:
            parts.append(f"- {a.reviewer_id} judged {a.aspect} {a.verdict}: "
                         f"{a.rationale}")
    return "\n".join(parts)


def revise(judge: AgentBackend, s: str, s_star: str,
           aspect_reviews: Sequence[Sequence[AspectReview]],
           required_surfaces: Sequence[str] = (),
           sentinel: str = "[M]", seed: int = 0) -> tuple[str, bool]:
    """Judge revises the augmented sentence in light of the reviews.

    A revision that loses a required entity surface or leaks the mask
    sentinel is rejected: the previous sentence stands and the step is
    reported as a no-op.
    """
    if not aspect_reviews:
        raise DebateProtocolError("revision requires at least one aspect review")
    prompt = render_prompt("debate_revision", {
        "reviews": _format_reviews(s, s_star, aspect_reviews),
        "answer_format": REVISE_FORMAT,
    })
    revised = _ask_with_retry(judge, prompt, seed, _parse_revision)
    if sentinel in revised or any(sf not in revised for sf in required_surfaces):
        return s_star, True
    return revised, False


def _parse_grade(text: str) -> float:
    lines = answer_lines(text)
    if lines is None:
        raise AgentResponseError("no fenced answer block in grade reply")
    for ln in lines:
        ln = ln.strip()
        if not ln.startswith("GRADE:"):
            continue
        body = ln[len("GRADE:"):].strip()
        if body.endswith("/100"):
            body = body[:-len("/100")].strip()
        try:
            value = int(body)
        except ValueError:
            continue
        return min(max(value, 0), 100) / 100.0
    raise AgentResponseError("grade reply contains no parsable GRADE line")


def grade_pair(grader: AgentBackend, s: str, s_star: str, iteration: int,
               seed: int = 0) -> Grade:
    """One non-judge agent grades the current augmented sentence."""
    topic = ("whether the augmented sentence preserves the meaning, entities "
             "and label of the original sentence")
    statement = f"Original: {s}\nAugmented: {s_star}"
    prompt = render_prompt("debate_review", {
        "topic": topic,
        "initial_statement": statement,
        "answer_format": GRADE_FORMAT,
    })
    value = _ask_with_retry(grader, prompt, seed, _parse_grade)
    return Grade(value=value, grader_id=grader.id, iteration=iteration)


def run_debate(s: str, s_star: str, agents: Sequence[AgentBackend],
               sigma: float = DEFAULT_SIGMA,
               max_iters: int = DEFAULT_MAX_ITERS,
               rng: random.Random | None = None,
               required_surfaces: Sequence[str] = (),
               sentinel: str = "[M]") -> tuple[bool, DebateTranscript]:
    """Run the full debate loop; the transcript records every iteration.

    Returns (accepted, transcript); transcript.final carries the last
    augmented sentence either way. A hard agent failure aborts with the
    partial transcript attached to the raised error.
    """
    if len(agents) < 2:
        raise DebateProtocolError(
            "debate requires a judge and at least one reviewer")
    if not 0 < sigma <= 1:
        raise DebateProtocolError(f"sigma must be in (0, 1], got {sigma}")
    if max_iters < 1:
        raise DebateProtocolError(f"max_iters must be >= 1, got {max_iters}")
    rng = rng or random.Random(0)
    transcript = DebateTranscript(original=s, augmented_initial=s_star,
                                  sigma=sigma, final=s_star)
    current = s_star
    try:
        for index in range(1, max_iters + 1):
            judge_idx = select_judge(agents, rng)
            judge = agents[judge_idx]
            others = [a for i, a in enumerate(agents) if i != judge_idx]
            seed = rng.randrange(2 ** 31)

            reviews, warnings = review_discrepancies(judge, s, current, seed)
            aspect_reviews: tuple[tuple[AspectReview, ...], ...] = ()
            revised, noop = current, True
            if reviews:
                aspect_reviews = tuple(
                    tuple(elaborate(r, reviews[0], s, current, seed + i + 1))
                    for i, r in enumerate(others))
                revised, noop = revise(judge, s, current, aspect_reviews,
                                       required_surfaces, sentinel,
                                       seed + len(others) + 1)
            current = revised
            grades = tuple(
                grade_pair(g, s, current, index, seed + 100 + i)
                for i, g in enumerate(others))
            acceptance = sum(g.value for g in grades) / len(grades)
            transcript.iterations.append(IterationRecord(
                index=index, judge_id=judge.id, reviews=tuple(reviews),
                review_warnings=warnings, aspect_reviews=aspect_reviews,
                revised=revised, revision_noop=noop, grades=grades,
                acceptance=acceptance))
            transcript.final = current
            if acceptance > sigma:
                transcript.outcome = "accepted"
                return True, transcript
        transcript.outcome = "exhausted"
        return False, transcript
    except (BackendError, AgentResponseError) as exc:
        transcript.outcome = "aborted"
        exc.transcript = transcript
        raise
