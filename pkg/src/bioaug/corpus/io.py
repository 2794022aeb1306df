"""Dataset ingestion and serialization.

The canonical on-disk format is UTF-8 JSON lines, one instance per line,
with an explicit task tag. Adapters normalize the common third-party
layouts into it:

* ``conll-bio``     token<TAB>tag lines, blank line between sentences
* ``re-tsv``        sentence<TAB>e1<TAB>e2<TAB>relation[<TAB>e1_type<TAB>e2_type]
* ``qa-json``       JSON array of {id?, question, passage, answer}
* ``tc-csv``        CSV with header columns text,topic[,id]

A relation-notion table maps labels to their definition text and is a
plain JSON object.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from bioaug.errors import DatasetFormatError
from bioaug.corpus.model import (
    Dataset,
    EntityMention,
    Provenance,
    Task,
    TaskInstance,
    token_texts,
    validate_instance,
)


def _record_to_instance(rec: dict, line: int) -> TaskInstance:
    try:
        task = Task(rec["task"])
    except KeyError:
        raise DatasetFormatError("missing task tag", line=line, field="task")
    except ValueError:
        raise DatasetFormatError(f"unknown task {rec['task']!r}", line=line, field="task")
    if "id" not in rec:
        raise DatasetFormatError("missing id", line=line, field="id")
    if "tokens" not in rec or not isinstance(rec["tokens"], list):
        raise DatasetFormatError("missing token list", line=line, field="tokens")

    entities = tuple(
        EntityMention(span=(e["span"][0], e["span"][1]),
                      entity_type=e["type"], surface=e["surface"])
        for e in rec.get("entities", ())
    )
    prov_rec = rec.get("provenance", {"kind": "original"})
    provenance = Provenance(kind=prov_rec.get("kind", "original"),
                            parent_id=prov_rec.get("parent_id"))
    offsets = rec.get("char_offsets")
    return TaskInstance(
        id=str(rec["id"]),
        task=task,
        tokens=tuple(rec["tokens"]),
        entities=entities,
        pair=tuple(rec["pair"]) if rec.get("pair") is not None else None,
        relation=rec.get("relation"),
        topic=rec.get("topic"),
        question=rec.get("question"),
        answer=rec.get("answer"),
        provenance=provenance,
        char_offsets=tuple((o[0], o[1]) for o in offsets) if offsets else None,
    )


def _instance_to_record(inst: TaskInstance) -> dict:
    rec: dict = {
        "id": inst.id,
        "task": inst.task.value,
        "tokens": list(inst.tokens),
    }
    if inst.entities:
        rec["entities"] = [
            {"span": [e.span[0], e.span[1]], "type": e.entity_type, "surface": e.surface}
            for e in inst.entities
        ]
    if inst.pair is not None:
        rec["pair"] = list(inst.pair)
    for key in ("relation", "topic", "question", "answer"):
        value = getattr(inst, key)
        if value is not None:
            rec[key] = value
    rec["provenance"] = {"kind": inst.provenance.kind}
    if inst.provenance.parent_id is not None:
        rec["provenance"]["parent_id"] = inst.provenance.parent_id
    if inst.char_offsets is not None:
        rec["char_offsets"] = [list(o) for o in inst.char_offsets]
    return rec


def _load_canonical(path: Path) -> list[TaskInstance]:
    instances = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                rec = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise DatasetFormatError(f"invalid JSON: {exc.msg}", line=lineno)
            if not isinstance(rec, dict):
                raise DatasetFormatError("record is not an object", line=lineno)
            instances.append(_record_to_instance(rec, lineno))
    return instances


def _load_conll_bio(path: Path) -> list[TaskInstance]:
    """BIO-tagged NER sentences; an I- tag without a matching run opens a new entity."""
    instances = []
    tokens: list[str] = []
    tags: list[str] = []
    stem = path.stem

    def flush(lineno: int) -> None:
        if not tokens:
            return
        entities = []
        start = None
        ent_type = None
        for i, tag in enumerate(tags + ["O"]):
            prefix, _, label = tag.partition("-")
            if start is not None and (prefix == "O" or prefix == "B" or label != ent_type):
                entities.append(EntityMention.from_tokens(tokens, (start, i - 1), ent_type))
                start, ent_type = None, None
            if prefix in ("B", "I") and start is None:
                if not label:
                    raise DatasetFormatError("BIO tag missing type", line=lineno, field="tag")
                start, ent_type = i, label
        instances.append(TaskInstance(
            id=f"{stem}-{len(instances)}",
            task=Task.NER,
            tokens=tuple(tokens),
            entities=tuple(entities),
        ))
        tokens.clear()
        tags.clear()

    with open(path, encoding="utf-8") as fh:
        lineno = 0
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                flush(lineno)
                continue
            cols = line.split("\t") if "\t" in line else line.split()
            if len(cols) < 2:
                raise DatasetFormatError("expected token and tag columns",
                                         line=lineno, field="tag")
            tok, tag = cols[0], cols[-1]
            if tag != "O" and not tag.startswith(("B-", "I-")):
                raise DatasetFormatError(f"unknown BIO tag {tag!r}", line=lineno, field="tag")
            tokens.append(tok)
            tags.append(tag)
        flush(lineno + 1)
    return instances


def _find_span(hay: list[str], needle: list[str], exclude: set[int]) -> tuple[int, int] | None:
    n = len(needle)
    for i in range(len(hay) - n + 1):
        if hay[i:i + n] == needle and not (set(range(i, i + n)) & exclude):
            return (i, i + n - 1)
    return None


def _load_re_tsv(path: Path) -> list[TaskInstance]:
    instances = []
    stem = path.stem
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) not in (4, 6):
                raise DatasetFormatError(
                    f"expected 4 or 6 tab-separated columns, got {len(cols)}", line=lineno)
            sentence, e1_sf, e2_sf, relation = cols[:4]
            e1_type = cols[4] if len(cols) == 6 else "ENT"
            e2_type = cols[5] if len(cols) == 6 else "ENT"
            for name, value in (("sentence", sentence), ("e1", e1_sf),
                                ("e2", e2_sf), ("relation", relation)):
                if not value.strip():
                    raise DatasetFormatError(f"empty {name} column",
                                             line=lineno, field=name)
            tokens = token_texts(sentence)
            span1 = _find_span(tokens, token_texts(e1_sf), set())
            if span1 is None:
                raise DatasetFormatError(f"e1 {e1_sf!r} not found in sentence",
                                         line=lineno, field="e1")
            span2 = _find_span(tokens, token_texts(e2_sf),
                               set(range(span1[0], span1[1] + 1)))
            if span2 is None:
                raise DatasetFormatError(f"e2 {e2_sf!r} not found in sentence",
                                         line=lineno, field="e2")
            ents = (EntityMention.from_tokens(tokens, span1, e1_type),
                    EntityMention.from_tokens(tokens, span2, e2_type))
            instances.append(TaskInstance(
                id=f"{stem}-{len(instances)}",
                task=Task.RE,
                tokens=tuple(tokens),
                entities=ents,
                pair=(0, 1),
                relation=relation.strip(),
            ))
    return instances


def _load_qa_json(path: Path) -> list[TaskInstance]:
    with open(path, encoding="utf-8") as fh:
        try:
            records = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DatasetFormatError(f"invalid JSON: {exc.msg}", line=exc.lineno)
    if not isinstance(records, list):
        raise DatasetFormatError("expected a JSON array of QA records")
    stem = path.stem
    instances = []
    for i, rec in enumerate(records):
        for name in ("question", "answer"):
            if not rec.get(name):
                raise DatasetFormatError(f"missing {name}", line=i + 1, field=name)
        passage = rec.get("passage") or rec.get("context")
        if not passage:
            raise DatasetFormatError("missing passage", line=i + 1, field="passage")
        instances.append(TaskInstance(
            id=str(rec.get("id", f"{stem}-{i}")),
            task=Task.QA,
            tokens=tuple(token_texts(passage)),
            question=rec["question"],
            answer=rec["answer"],
        ))
    return instances


def _load_tc_csv(path: Path) -> list[TaskInstance]:
    instances = []
    stem = path.stem
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"text", "topic"} <= set(reader.fieldnames):
            raise DatasetFormatError("header must declare text and topic columns",
                                     line=1, field="header")
        for i, row in enumerate(reader, start=2):
            if not (row.get("text") or "").strip():
                raise DatasetFormatError("empty text column", line=i, field="text")
            if not (row.get("topic") or "").strip():
                raise DatasetFormatError("empty topic column", line=i, field="topic")
            instances.append(TaskInstance(
                id=str(row.get("id") or f"{stem}-{i - 2}"),
                task=Task.TC,
                tokens=tuple(token_texts(row["text"])),
                topic=row["topic"].strip(),
            ))
    return instances


FORMATS = {
    "canonical-jsonl": _load_canonical,
    "conll-bio": _load_conll_bio,
    "re-tsv": _load_re_tsv,
    "qa-json": _load_qa_json,
    "tc-csv": _load_tc_csv,
}


def load_dataset(path: str | Path, fmt: str = "canonical-jsonl") -> Dataset:
    """Parse ``path`` into a validated Dataset, preserving record order."""
    if fmt not in FORMATS:
        raise DatasetFormatError(
            f"unknown format tag {fmt!r}; expected one of {sorted(FORMATS)}")
    path = Path(path)
    if not path.exists():
        raise DatasetFormatError(f"no such file: {path}")
    instances = FORMATS[fmt](path)
    ds = Dataset(instances)
    ids = ds.ids()
    for pos, inst in enumerate(instances):
        report = validate_instance(inst, known_ids=ids)
        if report:
            raise DatasetFormatError(
                f"invalid instance '{inst.id}': {report[0]}", line=pos + 1)
    return ds


def write_dataset(ds: Dataset, path: str | Path) -> None:
    """Serialize to the canonical format; output is byte-stable per input."""
    path = Path(path)
    report = ds.validate()
    if report:
        bad_id, violations = next(iter(report.items()))
        raise DatasetFormatError(f"refusing to write invalid instance '{bad_id}': "
                                 f"{violations[0]}")
    with open(path, "w", encoding="utf-8") as fh:
        for inst in ds:
            fh.write(json.dumps(_instance_to_record(inst), ensure_ascii=False,
                                sort_keys=True, separators=(",", ":")))
            fh.write("\n")


def load_notions(path: str | Path) -> dict[str, str]:
    """Load a label -> definition table; every definition must be non-empty."""
    with open(path, encoding="utf-8") as fh:
        table = json.load(fh)
    if not isinstance(table, dict):
        raise DatasetFormatError("notion table must be a JSON object")
    for label, definition in table.items():
        if not isinstance(definition, str) or not definition.strip():
            raise DatasetFormatError("empty definition", field=label)
    return table
