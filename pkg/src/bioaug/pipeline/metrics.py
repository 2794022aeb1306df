"""Evaluation metrics over gold datasets and prediction files.

Predictions arrive as JSON lines keyed by instance id. Each task reads
its own fields: entity lists for span labeling, one relation label,
topic label sets, or an answer string.
"""

from __future__ import annotations

import json
from pathlib import Path

from bioaug.errors import DatasetFormatError
from bioaug.corpus.model import Dataset, Task

DEFAULT_NEGATIVE_LABEL = "none"


def f1_from_counts(tp: int, fp: int, fn: int) -> dict:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = (2 * precision * recall / (precision + recall)
          if precision + recall else 0.0)
    return {"precision": precision, "recall": recall, "f1": f1,
            "tp": tp, "fp": fp, "fn": fn}


def entity_f1(gold: Dataset, predictions: dict[str, list]) -> dict:
    """Micro-averaged F1 over exact (span, type) matches."""
    tp = fp = fn = 0
    for inst in gold:
        gold_set = {(e.span[0], e.span[1], e.entity_type) for e in inst.entities}
        pred_set = {(int(p["span"][0]), int(p["span"][1]), p["type"])
                    for p in predictions[inst.id]}
        tp += len(gold_set & pred_set)
        fp += len(pred_set - gold_set)
        fn += len(gold_set - pred_set)
    return f1_from_counts(tp, fp, fn)


def relation_micro_f1(gold: Dataset, predictions: dict[str, str],
                      negative_label: str = DEFAULT_NEGATIVE_LABEL) -> dict:
    """Micro F1 over positive relation labels.

    The negative label counts as abstention: predicting it is never a
    false positive on a negative gold, and a positive gold predicted
    negative is only a false negative.
    """
    tp = fp = fn = 0
    for inst in gold:
        g = inst.relation
        p = predictions[inst.id]
        if g != negative_label and p == g:
            tp += 1
            continue
        if p != negative_label and p != g:
            fp += 1
        if g != negative_label and p != g:
            fn += 1
    return f1_from_counts(tp, fp, fn)


def average_micro_f1(gold: Dataset, predictions: dict[str, list]) -> dict:
    """Per-instance micro F1 of label sets, averaged over instances."""
    scores = []
    for inst in gold:
        gold_set = {inst.topic}
        pred_set = set(predictions[inst.id])
        overlap = len(gold_set & pred_set)
        denom = len(gold_set) + len(pred_set)
        scores.append(2 * overlap / denom if denom else 0.0)
    value = sum(scores) / len(scores) if scores else 0.0
    return {"average_micro_f1": value, "instances": len(scores)}


def answer_accuracy(gold: Dataset, predictions: dict[str, str]) -> dict:
    """Exact-match accuracy after whitespace and case folding."""
    def norm(s: str) -> str:
        return " ".join(s.split()).casefold()

    correct = sum(
        1 for inst in gold if norm(predictions[inst.id]) == norm(inst.answer or ""))
    total = len(gold)
    return {"accuracy": correct / total if total else 0.0,
            "correct": correct, "total": total}


def load_predictions(path: str | Path) -> dict[str, dict]:
    records = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                rec = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise DatasetFormatError(f"invalid JSON: {exc.msg}", line=lineno)
            if "id" not in rec:
                raise DatasetFormatError("prediction missing id",
                                         line=lineno, field="id")
            records[str(rec["id"])] = rec
    return records


def compute_metrics(gold: Dataset, predictions_path: str | Path,
                    task: Task | str,
                    negative_label: str = DEFAULT_NEGATIVE_LABEL) -> dict:
    """Score a prediction file against gold; ids must align exactly."""
    if not isinstance(task, Task):
        task = Task(str(task).upper())
    records = load_predictions(predictions_path)
    missing = [i for i in gold.ids() if i not in records]
    if missing:
        raise DatasetFormatError(
            f"predictions missing ids: {', '.join(sorted(missing))}")
    relevant = Dataset([inst for inst in gold if inst.task is task])
    if task is Task.NER:
        table = entity_f1(relevant, {i: records[i].get("entities", [])
                                     for i in relevant.ids()})
    elif task is Task.RE:
        table = relation_micro_f1(
            relevant,
            {i: records[i].get("relation", negative_label)
             for i in relevant.ids()},
            negative_label)
    elif task is Task.TC:
        table = average_micro_f1(relevant, {i: records[i].get("topics", [])
                                            for i in relevant.ids()})
    else:
        table = answer_accuracy(relevant, {i: records[i].get("answer", "")
                                           for i in relevant.ids()})
    return {"task": task.value, **table}
