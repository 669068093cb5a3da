"""Evaluation: confusion counts, the four ratio metrics, and ROC sweeps.

A ratio with a zero denominator is genuinely undefined, so it is carried as
None rather than a fabricated number; report renderers show a gap and
aggregate comparisons treat it as 0 (see metric_or_zero).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DataContractError

DEFAULT_THRESHOLDS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)


class LengthMismatch(DataContractError):
    """Predictions and labels differ in length."""


class SingleClassInput(DataContractError):
    """An operation needing both classes saw only one."""


@dataclass(frozen=True)
class ConfusionMetrics:
    tp: int
    fp: int
    tn: int
    fn: int
    precision: float | None
    recall: float | None
    f_measure: float | None
    accuracy: float

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def metric_or_zero(value: float | None) -> float:
    """Aggregate-side view of a possibly-undefined ratio."""
    return 0.0 if value is None else value


def _check_binary(values: Sequence[int], what: str) -> None:
    for v in values:
        if v not in (0, 1):
            raise DataContractError(f"{what} must be 0 or 1, got {v!r}")


def confusion_metrics(
    predictions: Sequence[int], labels: Sequence[int]
) -> ConfusionMetrics:
    """Counts and the four ratios; undefined ratios come back as None."""
    if len(predictions) != len(labels):
        raise LengthMismatch(
            f"{len(predictions)} predictions vs {len(labels)} labels"
        )
    if not labels:
        raise DataContractError("need at least one sample")
    _check_binary(predictions, "predictions")
    _check_binary(labels, "labels")
    tp = fp = tn = fn = 0
    for p, y in zip(predictions, labels):
        if p == 1 and y == 1:
            tp += 1
        elif p == 1 and y == 0:
            fp += 1
        elif p == 0 and y == 0:
            tn += 1
        else:
            fn += 1
    precision = tp / (tp + fp) if tp + fp else None
    recall = tp / (tp + fn) if tp + fn else None
    if precision is None or recall is None or precision + recall == 0:
        f_measure = None
    else:
        f_measure = 2 * precision * recall / (precision + recall)
    accuracy = (tp + tn) / len(labels)
    return ConfusionMetrics(
        tp=tp, fp=fp, tn=tn, fn=fn,
        precision=precision, recall=recall,
        f_measure=f_measure, accuracy=accuracy,
    )


@dataclass(frozen=True)
class RocPoint:
    threshold: float
    fpr: float
    tpr: float


def roc_curve(
    scores: Sequence[float],
    labels: Sequence[int],
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
) -> list[RocPoint]:
    """One (fpr, tpr) point per threshold, predicting 1 when score >= t."""
    if len(scores) != len(labels):
        raise LengthMismatch(f"{len(scores)} scores vs {len(labels)} labels")
    if not labels:
        raise DataContractError("need at least one sample")
    _check_binary(labels, "labels")
    for s in scores:
        if not isinstance(s, (int, float)) or not 0.0 <= s <= 1.0:
            raise DataContractError(f"scores must lie in [0, 1], got {s!r}")
    positives = sum(labels)
    negatives = len(labels) - positives
    if positives == 0 or negatives == 0:
        raise SingleClassInput("ROC needs both classes present")
    points = []
    for t in thresholds:
        tp = sum(1 for s, y in zip(scores, labels) if s >= t and y == 1)
        fp = sum(1 for s, y in zip(scores, labels) if s >= t and y == 0)
        points.append(RocPoint(threshold=t, fpr=fp / negatives, tpr=tp / positives))
    return points


def split_train_test(items: Sequence, train_size: int) -> tuple[list, list]:
    """Order-preserving prefix/suffix split (the paper-style fixed split)."""
    if not 0 < train_size < len(items):
        raise DataContractError(
            f"train_size must be in (0, {len(items)}), got {train_size}"
        )
    return list(items[:train_size]), list(items[train_size:])
