"""Masked, entity-marked templates.

A template keeps the selected keywords and the entity tokens in place,
replaces everything else with one reserved sentinel, then appends each
entity wrapped in type markers. Rendering is plain text so any infill
backend can consume it; parsing and structural inversion recover what
went in.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from bioaug.errors import SpanRecoveryError
from bioaug.corpus.model import EntityMention

MASK_SENTINEL = "[M]"
_SEPARATOR = " | "


def escape_markup(text: str) -> str:
    """Escape marker-significant characters; backslash first."""
    return text.replace("\\", "\\\\").replace("<", "\\<")


def unescape_markup(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            out.append(text[i + 1])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def render_marked_entity(entity: EntityMention) -> str:
    etype = escape_markup(entity.entity_type)
    return f"<s:{etype}> {escape_markup(entity.surface)} </s:{etype}>"


@dataclass(frozen=True)
class MaskedTemplate:
    """Masked token sequence plus the marked entities appended after it."""

    masked_tokens: tuple[str, ...]
    entities: tuple[EntityMention, ...]
    keyword_indices: tuple[int, ...]
    source_tokens: tuple[str, ...]
    sentinel: str = MASK_SENTINEL

    def render(self) -> str:
        parts = [" ".join(self.masked_tokens)]
        parts.extend(render_marked_entity(e) for e in self.entities)
        return _SEPARATOR.join(parts)

    def invert(self) -> tuple[tuple[int, ...], tuple[tuple[int, int], ...]]:
        """Recover the keyword indices and entity spans exactly."""
        return self.keyword_indices, tuple(e.span for e in self.entities)


def build_masked_template(tokens: Sequence[str], keywords: Sequence[int],
                          entities: Sequence[EntityMention],
                          sentinel: str = MASK_SENTINEL) -> MaskedTemplate:
    toks = tuple(tokens)
    keep = set(keywords)
    for ent in entities:
        keep.update(ent.indices())
    masked = tuple(t if i in keep else sentinel for i, t in enumerate(toks))
    return MaskedTemplate(
        masked_tokens=masked,
        entities=tuple(entities),
        keyword_indices=tuple(sorted(set(keywords))),
        source_tokens=toks,
        sentinel=sentinel,
    )


def _parse_marked_entity(block: str) -> tuple[str, str]:
    if not block.startswith("<s:"):
        raise SpanRecoveryError(f"malformed entity block: {block!r}")
    head_end = block.find("> ")
    if head_end < 0:
        raise SpanRecoveryError(f"unterminated open marker: {block!r}")
    etype_raw = block[3:head_end]
    closer = f" </s:{etype_raw}>"
    if not block.endswith(closer):
        raise SpanRecoveryError(f"missing close marker for {etype_raw!r}")
    surface_raw = block[head_end + 2:len(block) - len(closer)]
    return unescape_markup(etype_raw), unescape_markup(surface_raw)


def parse_rendered_template(rendered: str,
                            sentinel: str = MASK_SENTINEL,
                            ) -> tuple[tuple[str, ...], tuple[tuple[str, str], ...]]:
    """Split a rendered template into masked tokens and (type, surface) pairs.

    Scans from the right: escaped surfaces can never contain the literal
    separator-plus-open-marker sequence, so the split is unambiguous.
    """
    body = rendered
    pairs: list[tuple[str, str]] = []
    marker_start = _SEPARATOR + "<s:"
    while True:
        cut = body.rfind(marker_start)
        if cut < 0:
            break
        pairs.append(_parse_marked_entity(body[cut + len(_SEPARATOR):]))
        body = body[:cut]
    pairs.reverse()
    return tuple(body.split(" ")), tuple(pairs)
