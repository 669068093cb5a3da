"""Timestamp-ordered replay: the adaptive-vs-fixed model experiment.

The corpus is walked in close order. A seed prefix trains model v1; each
following batch is scored against the state as it existed before the batch,
then (in adaptive mode) the batch's labels are absorbed and the model
retrained. Fixed mode freezes both the model and the count state after the
seed, which is the baseline the adaptive system is measured against.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import DataContractError
from .features import (
    DEFAULT_MIN_SUPPORT,
    build_training_set,
    feature_vector,
)
from .logistic import (
    DEFAULT_LR,
    DEFAULT_MAX_ITERS,
    DEFAULT_TOL,
    Model,
    campaign_score,
    classify,
    train,
)
from .metrics import (
    DEFAULT_THRESHOLDS,
    ConfusionMetrics,
    RocPoint,
    confusion_metrics,
    roc_curve,
    split_train_test,
)
from .sessions import QASession, close_order
from .text import UserSpamCounts, WordStats, apply_label, distinct_words

ADAPTIVE = "adaptive"
FIXED = "fixed"


class CorpusTooSmall(DataContractError):
    """Corpus does not extend past the seed."""


class SingleClassSeed(DataContractError):
    """The seed prefix contains only one class."""


@dataclass(frozen=True)
class ReplayConfig:
    seed_size: int = 200
    batch_size: int = 200
    mode: str = ADAPTIVE
    lr: float = DEFAULT_LR
    max_iters: int = DEFAULT_MAX_ITERS
    tol: float = DEFAULT_TOL
    min_support: int = DEFAULT_MIN_SUPPORT


@dataclass(frozen=True)
class IterationReport:
    iteration_index: int
    theta_snapshot: tuple[float, float, float, float]
    metrics: ConfusionMetrics
    training_size: int
    test_size: int


def _check_labeled(corpus: Sequence[QASession]) -> None:
    for s in corpus:
        if s.label is None:
            raise DataContractError(f"replay requires labeled sessions: {s.url}")


def replay(corpus: Sequence[QASession], cfg: ReplayConfig) -> list[IterationReport]:
    """Run the replay experiment; one report per test batch.

    Sessions are processed in close order (answer_time, then url). The final
    partial batch is a normal iteration. No session is ever in the training
    pool of the model that scores it.
    """
    if cfg.mode not in (ADAPTIVE, FIXED):
        raise DataContractError(f"mode must be adaptive or fixed: {cfg.mode!r}")
    if cfg.seed_size < 2 or cfg.batch_size < 1:
        raise DataContractError("seed_size must be >= 2 and batch_size >= 1")
    if len(corpus) <= cfg.seed_size:
        raise CorpusTooSmall(
            f"corpus has {len(corpus)} sessions, need more than {cfg.seed_size}"
        )
    _check_labeled(corpus)

    ordered = close_order(corpus)
    words = {s.url: frozenset(distinct_words(s)) for s in ordered}
    seed = ordered[: cfg.seed_size]
    if len({s.label for s in seed}) < 2:
        raise SingleClassSeed("seed prefix must contain both classes")

    stats = WordStats()
    counts = UserSpamCounts()
    pool: list[QASession] = []
    for s in seed:
        apply_label(stats, counts, s, s.label, words=words[s.url])
        pool.append(s)

    def fit(version: int) -> Model:
        X, y, neutral = build_training_set(
            pool, stats, counts, min_support=cfg.min_support, words_by_url=words
        )
        return train(
            X, y,
            lr=cfg.lr, max_iters=cfg.max_iters, tol=cfg.tol,
            version=version, neutral_sgtext=neutral,
        )

    model = fit(version=1)
    reports: list[IterationReport] = []
    batches = [
        ordered[i : i + cfg.batch_size]
        for i in range(cfg.seed_size, len(ordered), cfg.batch_size)
    ]
    training_size = cfg.seed_size
    for index, batch in enumerate(batches):
        predictions = []
        truth = []
        for s in batch:
            fv = feature_vector(
                s, stats, counts,
                neutral=model.neutral_sgtext,
                min_support=cfg.min_support,
                words=words[s.url],
            )
            label, _ = classify(model, fv)
            predictions.append(label)
            truth.append(s.label)
        reports.append(
            IterationReport(
                iteration_index=index,
                theta_snapshot=model.theta,
                metrics=confusion_metrics(predictions, truth),
                training_size=training_size,
                test_size=len(batch),
            )
        )
        if cfg.mode == ADAPTIVE and index + 1 < len(batches):
            for s in batch:
                apply_label(stats, counts, s, s.label, words=words[s.url])
                pool.append(s)
            training_size += len(batch)
            model = fit(version=model.version + 1)
    return reports


def retrain(store, new_labeled: Sequence[QASession] = ()) -> Model:
    """Absorb newly labeled sessions into a store and train the next model
    version. Delegates to the store, which owns the single-writer lock and
    the atomic publication of the (model, state) pair."""
    return store.retrain(new_labeled)


@dataclass(frozen=True)
class RocExperiment:
    points: list[RocPoint]
    scores: list[float]
    labels: list[int]
    model: Model


def roc_split_experiment(
    corpus: Sequence[QASession],
    train_size: int,
    rng_seed: int = 0,
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
    lr: float = DEFAULT_LR,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
) -> RocExperiment:
    """The fixed-split ROC experiment: seeded shuffle, train on train_size
    sessions, sweep thresholds over scores of the held-out rest."""
    _check_labeled(corpus)
    shuffled = list(corpus)
    random.Random(rng_seed).shuffle(shuffled)
    train_part, test_part = split_train_test(shuffled, train_size)

    stats = WordStats()
    counts = UserSpamCounts()
    for s in train_part:
        apply_label(stats, counts, s, s.label)
    X, y, neutral = build_training_set(train_part, stats, counts)
    model = train(X, y, lr=lr, max_iters=max_iters, tol=tol,
                  version=1, neutral_sgtext=neutral)
    scores = [
        campaign_score(model, feature_vector(s, stats, counts, neutral=neutral))
        for s in test_part
    ]
    labels = [int(s.label) for s in test_part]
    return RocExperiment(
        points=roc_curve(scores, labels, thresholds),
        scores=scores,
        labels=labels,
        model=model,
    )


# Replay report file: tab-separated, one row per iteration; undefined ratios
# render as empty cells.
_REPORT_COLUMNS = (
    "iteration", "theta_0", "theta_1", "theta_2", "theta_3",
    "tp", "fp", "tn", "fn",
    "precision", "recall", "f_measure", "accuracy",
    "training_size", "test_size",
)


def _cell(value: float | None) -> str:
    return "" if value is None else repr(value)


def write_replay_report(reports: Sequence[IterationReport], path: str | Path) -> None:
    lines = ["\t".join(_REPORT_COLUMNS)]
    for r in reports:
        m = r.metrics
        row = [
            str(r.iteration_index),
            *(repr(t) for t in r.theta_snapshot),
            str(m.tp), str(m.fp), str(m.tn), str(m.fn),
            _cell(m.precision), _cell(m.recall), _cell(m.f_measure),
            repr(m.accuracy),
            str(r.training_size), str(r.test_size),
        ]
        lines.append("\t".join(row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_replay_report(path: str | Path) -> list[IterationReport]:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or lines[0].split("\t") != list(_REPORT_COLUMNS):
        raise DataContractError(f"unrecognized replay report header in {path}")
    reports = []
    for line_no, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        if len(parts) != len(_REPORT_COLUMNS):
            raise DataContractError(
                f"replay report line {line_no}: expected "
                f"{len(_REPORT_COLUMNS)} columns, got {len(parts)}"
            )
        row = dict(zip(_REPORT_COLUMNS, parts))
        try:
            metrics = ConfusionMetrics(
                tp=int(row["tp"]), fp=int(row["fp"]),
                tn=int(row["tn"]), fn=int(row["fn"]),
                precision=float(row["precision"]) if row["precision"] else None,
                recall=float(row["recall"]) if row["recall"] else None,
                f_measure=float(row["f_measure"]) if row["f_measure"] else None,
                accuracy=float(row["accuracy"]),
            )
            reports.append(
                IterationReport(
                    iteration_index=int(row["iteration"]),
                    theta_snapshot=(
                        float(row["theta_0"]), float(row["theta_1"]),
                        float(row["theta_2"]), float(row["theta_3"]),
                    ),
                    metrics=metrics,
                    training_size=int(row["training_size"]),
                    test_size=int(row["test_size"]),
                )
            )
        except ValueError as exc:
            raise DataContractError(
                f"replay report line {line_no}: malformed value ({exc})"
            ) from exc
    return reports
