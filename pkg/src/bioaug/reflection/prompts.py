"""Prompt template loading and placeholder substitution.

Templates are plain text files shipped with the package. Substitution is
single-pass: declared placeholders are replaced simultaneously and the
inserted values are never rescanned, so a value that happens to contain
bracketed text stays literal.
"""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

from bioaug.errors import PromptVariableError

# template id -> {variable name -> placeholder literal}
TEMPLATE_VARIABLES: dict[str, dict[str, str]] = {
    "debate_initial": {
        "topic": "[Insert topic here]",
        "answer_format": "[Answer format]",
    },
    "debate_review": {
        "topic": "[Insert topic here]",
        "initial_statement": "[Initial Statement]",
        "answer_format": "[Answer format]",
    },
    "debate_revision": {
        "reviews": "[Reviews]",
        "answer_format": "[Answer format]",
    },
    "distinguish": {
        "original": "[Insert original here]",
        "augmented": "[Insert augmented here]",
        "answer_format": "[Answer format]",
    },
    "task_answer_ner": {
        "sentence": "[Insert sentence or passage]",
    },
    "task_answer_re": {
        "sentence": "[Insert sentence or passage]",
    },
    "task_answer_tc": {
        "sentence": "[Insert sentence or passage]",
        "categories": "[Insert categories, e.g., positive/negative, news/sports/entertainment]",
    },
    "task_answer_qa": {
        "passage": "[Insert passage]",
        "question": "[Insert question]",
    },
}

TEMPLATE_IDS = ("debate_initial", "debate_review", "debate_revision",
                "task_answer", "distinguish")


@lru_cache(maxsize=None)
def _template_text(name: str) -> str:
    path = resources.files("bioaug.reflection").joinpath(f"templates/{name}.txt")
    return path.read_text(encoding="utf-8")


def _resolve(template_id: str, variables: dict[str, str]) -> str:
    if template_id != "task_answer":
        return template_id
    task = (variables.get("task") or "").lower()
    resolved = f"task_answer_{task}"
    if resolved not in TEMPLATE_VARIABLES:
        raise PromptVariableError("task")
    return resolved


def render_prompt(template_id: str, variables: dict[str, str]) -> str:
    """Render one template; every declared placeholder must be supplied.

    An absent or empty variable raises an error naming the placeholder
    it would have filled. The "task_answer" id dispatches on a "task"
    variable (ner, re, tc, qa).
    """
    if template_id not in TEMPLATE_IDS and template_id not in TEMPLATE_VARIABLES:
        raise PromptVariableError(template_id)
    name = _resolve(template_id, variables)
    declared = TEMPLATE_VARIABLES[name]
    values: dict[str, str] = {}
    for var, placeholder in declared.items():
        value = variables.get(var)
        if not value:
            raise PromptVariableError(placeholder)
        values[placeholder] = value
    pattern = re.compile("|".join(re.escape(p) for p in declared.values()))
    return pattern.sub(lambda m: values[m.group(0)], _template_text(name))
