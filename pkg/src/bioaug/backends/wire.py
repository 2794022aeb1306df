"""Wire contracts shared by the HTTP clients and any server implementing them.

Schemas are plain jsonschema-style dicts so a serving process can import
and enforce exactly what the clients expect, with no second copy to
drift. The template wire encoding flattens a masked template into one
token list: masked sentence first, then each entity as a separator bar
followed by its marker-wrapped surface tokens.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from bioaug.errors import ContractViolationError
from bioaug.attribution.template import MaskedTemplate, escape_markup, unescape_markup

SCORE_KINDS = ("task-logit", "inference-relativity")

SCORE_REQUEST_SCHEMA = {
    "type": "object",
    "required": ["sequence", "kind"],
    "properties": {
        "sequence": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "restriction_text": {"type": "string"},
        "kind": {"enum": list(SCORE_KINDS)},
    },
    "additionalProperties": False,
}

SCORE_RESPONSE_SCHEMA = {
    "type": "object",
    "required": ["score"],
    "properties": {"score": {"type": "number"}},
}

INFILL_REQUEST_SCHEMA = {
    "type": "object",
    "required": ["template_tokens", "mask_sentinel", "restriction_text",
                 "key_structure", "seed"],
    "properties": {
        "template_tokens": {"type": "array", "items": {"type": "string"},
                            "minItems": 1},
        "mask_sentinel": {"type": "string", "minLength": 1},
        "restriction_text": {"type": "string"},
        "key_structure": {"type": "string"},
        "seed": {"type": "integer"},
    },
    "additionalProperties": False,
}

INFILL_RESPONSE_SCHEMA = {
    "type": "object",
    "required": ["tokens"],
    "properties": {"tokens": {"type": "array", "items": {"type": "string"}}},
}

EXTRACT_REQUEST_SCHEMA = {
    "type": "object",
    "required": ["concatenated_sentences"],
    "properties": {
        "concatenated_sentences": {"type": "array",
                                   "items": {"type": "string"}, "minItems": 1},
        "failing_pairs": {
            "type": "array",
            "items": {
                "type": "array",
                "prefixItems": [{"type": "string"}, {"type": "number"}],
                "minItems": 2,
                "maxItems": 2,
            },
        },
    },
    "additionalProperties": False,
}

EXTRACT_RESPONSE_SCHEMA = {
    "type": "object",
    "required": ["structure_text"],
    "properties": {"structure_text": {"type": "string"}},
}

CHAT_REQUEST_SCHEMA = {
    "type": "object",
    "required": ["system", "user", "temperature", "top_p", "seed"],
    "properties": {
        "system": {"type": "string"},
        "user": {"type": "string"},
        "temperature": {"type": "number"},
        "top_p": {"type": "number"},
        "seed": {"type": "integer"},
    },
    "additionalProperties": False,
}

CHAT_RESPONSE_SCHEMA = {
    "type": "object",
    "required": ["text"],
    "properties": {
        "text": {"type": "string"},
        "deterministic": {"type": "boolean"},
        "model": {"type": "string"},
    },
}

HEALTH_RESPONSE_SCHEMA = {
    "type": "object",
    "required": ["status"],
    "properties": {
        "status": {"type": "string"},
        "models": {"type": "object"},
    },
}

_SEPARATOR_TOKEN = "|"
_OPEN_TOKEN = re.compile(r"^<s:(.+)>$")
_CLOSE_TOKEN = re.compile(r"^</s:(.+)>$")


@dataclass(frozen=True)
class WireTemplate:
    """Server-side view of a template: enough to fill it, nothing more."""

    masked_tokens: tuple[str, ...]
    sentinel: str
    entities: tuple[tuple[str, str], ...]  # (entity_type, surface)


def template_to_wire(template: MaskedTemplate) -> dict:
    tokens = list(template.masked_tokens)
    for ent in template.entities:
        etype = escape_markup(ent.entity_type)
        tokens.append(_SEPARATOR_TOKEN)
        tokens.append(f"<s:{etype}>")
        tokens.extend(ent.surface.split(" "))
        tokens.append(f"</s:{etype}>")
    return {"template_tokens": tokens, "mask_sentinel": template.sentinel}


def parse_wire_template(template_tokens: list[str], sentinel: str) -> WireTemplate:
    """Split a flattened template back into sentence and entity blocks."""
    boundaries = [
        i for i in range(len(template_tokens) - 1)
        if template_tokens[i] == _SEPARATOR_TOKEN
        and _OPEN_TOKEN.match(template_tokens[i + 1])
    ]
    masked_end = boundaries[0] if boundaries else len(template_tokens)
    masked = tuple(template_tokens[:masked_end])
    entities = []
    for pos, start in enumerate(boundaries):
        end = boundaries[pos + 1] if pos + 1 < len(boundaries) else len(template_tokens)
        block = template_tokens[start + 1:end]
        open_match = _OPEN_TOKEN.match(block[0]) if block else None
        close_match = _CLOSE_TOKEN.match(block[-1]) if len(block) >= 3 else None
        if not open_match or not close_match \
                or open_match.group(1) != close_match.group(1):
            raise ContractViolationError("malformed entity block in wire template")
        entities.append((unescape_markup(open_match.group(1)),
                         " ".join(block[1:-1])))
    if not masked:
        raise ContractViolationError("wire template has an empty sentence part")
    return WireTemplate(masked_tokens=masked, sentinel=sentinel,
                        entities=tuple(entities))
