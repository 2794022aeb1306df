"""Debate stage: agent seam, prompt templates, and the review loop."""

from bioaug.reflection.agents import AGENT_TEMPERATURE, AGENT_TOP_P, AgentBackend
from bioaug.reflection.debate import (
    ANSWER_CLOSE,
    ANSWER_OPEN,
    ASPECTS,
    DEFAULT_MAX_ITERS,
    DEFAULT_SIGMA,
    FIELD_SEP,
    AspectReview,
    DebateTranscript,
    DiscrepancyReview,
    Grade,
    IterationRecord,
    answer_lines,
    aspect_answer_format,
    elaborate,
    grade_pair,
    review_discrepancies,
    revise,
    run_debate,
    select_judge,
)
from bioaug.reflection.prompts import TEMPLATE_IDS, TEMPLATE_VARIABLES, render_prompt

__all__ = [
    "AGENT_TEMPERATURE",
    "AGENT_TOP_P",
    "ANSWER_CLOSE",
    "ANSWER_OPEN",
    "ASPECTS",
    "AgentBackend",
    "AspectReview",
    "DEFAULT_MAX_ITERS",
    "DEFAULT_SIGMA",
    "DebateTranscript",
    "DiscrepancyReview",
    "FIELD_SEP",
    "Grade",
    "IterationRecord",
    "TEMPLATE_IDS",
    "TEMPLATE_VARIABLES",
    "answer_lines",
    "aspect_answer_format",
    "elaborate",
    "grade_pair",
    "render_prompt",
    "review_discrepancies",
    "revise",
    "run_debate",
    "select_judge",
]
