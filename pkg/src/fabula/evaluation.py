"""Metric harness for temporal-label predictions and human chain judgments.

Temporal scoring compares gold and predicted four-way relations over a set
of event pairs. Only pairs whose gold label is in the evaluation label set
(BEFORE and AFTER by default) are scored; vague or simultaneous gold pairs
are dropped before any metric is computed. Micro F1 then equals plain
accuracy (each pair carries exactly one label), and macro F1 is the
unweighted mean of the per-label F1 scores.

Note one convention wrinkle: for a degenerate predictor that emits a
single label everywhere, some published tables print that label's
precision and recall in the transposed order. This harness always emits
both numbers under the standard definitions (precision = tp / predicted,
recall = tp / gold); F1 is identical under either convention.

Chain-quality judgments are precision sheets: a human marked each sampled
item correct or incorrect along one dimension (salient, subject-character,
subject-gender, temporal-order), and the score is simply the fraction
marked correct, reported with its sample size.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, Sequence

from .model import RelationValue, TemporalLabel

EVAL_LABELS: tuple[RelationValue, ...] = (RelationValue.BEFORE, RelationValue.AFTER)

JUDGMENT_DIMENSIONS = ("salient", "subject-character", "subject-gender", "temporal-order")


class EmptyEvaluationError(ValueError):
    """No scorable items remain after filtering."""


@dataclass(frozen=True)
class LabeledPair:
    pair_id: str
    gold: RelationValue
    predicted: RelationValue


class PrecisionRecallF1(NamedTuple):
    precision: float
    recall: float
    f1: float


def _check_unique(pairs: Sequence[LabeledPair]) -> None:
    ids = [p.pair_id for p in pairs]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise ValueError(f"duplicate pair ids: {dupes[:5]}")


def per_label_prf(pairs: Sequence[LabeledPair], label: RelationValue) -> PrecisionRecallF1:
    """Standard precision/recall/F1 for one label over the given pairs.

    A label never predicted gets precision 0 (and hence F1 0); a label
    never in gold gets recall 0.
    """
    _check_unique(pairs)
    tp = sum(1 for p in pairs if p.gold == label and p.predicted == label)
    predicted = sum(1 for p in pairs if p.predicted == label)
    gold = sum(1 for p in pairs if p.gold == label)
    precision = tp / predicted if predicted else 0.0
    recall = tp / gold if gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return PrecisionRecallF1(precision, recall, f1)


def filter_scored(
    pairs: Iterable[LabeledPair],
    eval_labels: Sequence[RelationValue] = EVAL_LABELS,
) -> list[LabeledPair]:
    """Drop pairs whose gold label is outside the evaluation label set."""
    wanted = set(eval_labels)
    return [p for p in pairs if p.gold in wanted]


def micro_macro_f1(
    pairs: Sequence[LabeledPair],
    eval_labels: Sequence[RelationValue] = EVAL_LABELS,
) -> tuple[float, float]:
    """(micro F1, macro F1) over the scored pairs.

    Micro F1 reduces to accuracy because each pair has exactly one gold
    and one predicted label; macro F1 averages per-label F1 over the
    evaluation labels without frequency weighting.
    """
    scored = filter_scored(pairs, eval_labels)
    if not scored:
        raise EmptyEvaluationError("no pairs with gold labels in the evaluation set")
    _check_unique(scored)
    micro = sum(1 for p in scored if p.gold == p.predicted) / len(scored)
    macro = sum(per_label_prf(scored, label).f1 for label in eval_labels) / len(eval_labels)
    return micro, macro


@dataclass(frozen=True)
class JudgmentSheet:
    """Human correctness judgments for one chain dimension."""

    dimension: str
    items: tuple[tuple[str, bool], ...]

    def __post_init__(self) -> None:
        ids = [i for i, _ in self.items]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate item ids in {self.dimension} sheet")


def judgment_precision(sheet: JudgmentSheet) -> tuple[float, int]:
    """(fraction judged correct, sample count) for one sheet."""
    if not sheet.items:
        raise EmptyEvaluationError(f"judgment sheet {sheet.dimension!r} is empty")
    correct = sum(1 for _, ok in sheet.items if ok)
    return correct / len(sheet.items), len(sheet.items)


_TRUE = {"true", "1", "yes", "y"}
_FALSE = {"false", "0", "no", "n"}


def load_judgment_sheets(content: str) -> list[JudgmentSheet]:
    """Parse `dimension,item_id,correct` CSV (header optional) into one
    sheet per dimension, in order of first appearance."""
    reader = csv.reader(io.StringIO(content))
    grouped: dict[str, list[tuple[str, bool]]] = {}
    for lineno, row in enumerate(reader, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if lineno == 1 and [c.strip().lower() for c in row] == ["dimension", "item_id", "correct"]:
            continue
        if len(row) != 3:
            raise ValueError(f"judgments line {lineno}: expected 3 columns, got {len(row)}")
        dimension, item_id, raw = (c.strip() for c in row)
        flag = raw.lower()
        if flag in _TRUE:
            correct = True
        elif flag in _FALSE:
            correct = False
        else:
            raise ValueError(f"judgments line {lineno}: correct must be true/false, got {raw!r}")
        grouped.setdefault(dimension, []).append((item_id, correct))
    return [JudgmentSheet(dim, tuple(items)) for dim, items in grouped.items()]


def load_label_file(path: str | Path) -> list[dict]:
    """Read the `temporal_labels` array from a label file (the same shape
    the annotation bundle uses; gold files additionally mark entries with
    `"gold": true`)."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(data, dict):
        labels = data.get("temporal_labels")
    else:
        labels = data
    if not isinstance(labels, list):
        raise ValueError(f"{path}: expected a temporal_labels array")
    return labels


def _flip(relation: RelationValue) -> RelationValue:
    if relation == RelationValue.BEFORE:
        return RelationValue.AFTER
    if relation == RelationValue.AFTER:
        return RelationValue.BEFORE
    return relation


def pair_labeled_set(
    gold: Iterable[TemporalLabel | dict],
    predicted: Iterable[TemporalLabel | dict],
) -> list[LabeledPair]:
    """Join gold and predicted labels on their event pair.

    Orientation is normalized: a prediction for (right, left) counts for
    (left, right) with BEFORE/AFTER flipped. Every gold pair must have a
    prediction; missing ones raise.
    """

    def as_label(rec: TemporalLabel | dict) -> TemporalLabel:
        if isinstance(rec, TemporalLabel):
            return rec
        return TemporalLabel(
            left=rec["left"],
            right=rec["right"],
            relation=RelationValue(rec["relation"]),
            confidence=rec.get("confidence"),
        )

    pred_by_pair: dict[tuple[int, int], RelationValue] = {}
    for rec in predicted:
        lb = as_label(rec)
        pred_by_pair.setdefault((lb.left, lb.right), lb.relation)

    out: list[LabeledPair] = []
    missing: list[tuple[int, int]] = []
    for rec in gold:
        lb = as_label(rec)
        if (lb.left, lb.right) in pred_by_pair:
            pred = pred_by_pair[(lb.left, lb.right)]
        elif (lb.right, lb.left) in pred_by_pair:
            pred = _flip(pred_by_pair[(lb.right, lb.left)])
        else:
            missing.append((lb.left, lb.right))
            continue
        out.append(LabeledPair(pair_id=f"{lb.left}-{lb.right}", gold=lb.relation, predicted=pred))
    if missing:
        raise ValueError(f"predictions missing for {len(missing)} gold pairs, e.g. {missing[:3]}")
    return out
