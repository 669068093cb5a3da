"""Logistic regression from scratch: sigmoid scoring, cross-entropy cost,
analytic gradient, and full-batch gradient-descent training.

The design matrix carries an all-ones first column, so theta[0] is the
intercept. Training is deterministic: zeros initialization, fixed step size,
stop on small cost change or the iteration cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import DataContractError, InternalInvariantError
from .features import FeatureVector

DEFAULT_LR = 0.1
DEFAULT_MAX_ITERS = 20000
DEFAULT_TOL = 1e-7
DEFAULT_THRESHOLD = 0.5

_CLIP = 1e-12


class EmptyTrainingSet(DataContractError):
    """No rows to train or evaluate on."""


class SingleClassTrainingSet(DataContractError):
    """Training labels contain only one class."""


@dataclass(frozen=True)
class Model:
    """An immutable trained scorer.

    theta = (intercept, weight for sg_qid, for sg_aid, for sg_text);
    neutral_sgtext is the empty-text feature value the model was trained
    with, carried so scoring stays consistent with training.
    """

    theta: tuple[float, float, float, float]
    threshold: float
    version: int
    trained_count: int
    neutral_sgtext: float

    def __post_init__(self) -> None:
        if len(self.theta) != 4 or not all(math.isfinite(t) for t in self.theta):
            raise DataContractError(f"theta must be 4 finite reals: {self.theta!r}")
        if not 0.0 < self.threshold < 1.0:
            raise DataContractError(f"threshold must be in (0,1): {self.threshold!r}")
        if self.version < 0 or self.trained_count < 0:
            raise DataContractError("version and trained_count must be >= 0")


def zero_model(version: int = 0) -> Model:
    """The cold-start scorer: every session scores 0.5."""
    return Model(
        theta=(0.0, 0.0, 0.0, 0.0),
        threshold=DEFAULT_THRESHOLD,
        version=version,
        trained_count=0,
        neutral_sgtext=0.0,
    )


def sigmoid(z: float) -> float:
    """1/(1+e^(-z)), stable against overflow for any finite z."""
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def _sigmoid_vec(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _check_training_set(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != 4:
        raise DataContractError(f"X must be (m, 4), got shape {X.shape}")
    if X.shape[0] == 0:
        raise EmptyTrainingSet("no training rows")
    if y.shape != (X.shape[0],):
        raise DataContractError(
            f"y must have one label per row: X has {X.shape[0]}, y has {y.shape}"
        )
    if not np.all((y == 0.0) | (y == 1.0)):
        raise DataContractError("labels must be 0 or 1")
    if not np.all(X[:, 0] == 1.0):
        raise DataContractError("first column of X must be all ones")
    return X, y


def _cost_from_h(h: np.ndarray, y: np.ndarray) -> float:
    h = np.clip(h, _CLIP, 1.0 - _CLIP)
    return float(np.mean(-y * np.log(h) - (1.0 - y) * np.log(1.0 - h)))


def cost(theta: Sequence[float], X: np.ndarray, y: np.ndarray) -> float:
    """Mean cross-entropy with predictions clipped into [1e-12, 1-1e-12]."""
    X, y = _check_training_set(X, y)
    th = np.asarray(theta, dtype=np.float64)
    return _cost_from_h(_sigmoid_vec(X @ th), y)


def gradient(theta: Sequence[float], X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Analytic gradient of the (unclipped) cost: (1/m) X^T (h - y)."""
    X, y = _check_training_set(X, y)
    th = np.asarray(theta, dtype=np.float64)
    h = _sigmoid_vec(X @ th)
    return (X.T @ (h - y)) / X.shape[0]


def train(
    X: np.ndarray,
    y: np.ndarray,
    lr: float = DEFAULT_LR,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
    threshold: float = DEFAULT_THRESHOLD,
    version: int = 1,
    neutral_sgtext: float = 0.0,
    on_step: Callable[[int, float], None] | None = None,
) -> Model:
    """Full-batch gradient descent from theta = zeros.

    Stops when the cost change between consecutive iterations falls below
    ``tol`` or after ``max_iters`` steps. ``on_step(iteration, cost)`` is
    invoked after every update when given (iteration 0 reports the initial
    cost). The cost must never increase along the run; an increase beyond
    1e-9 means the step size violates the descent contract and raises.
    """
    X, y = _check_training_set(X, y)
    if X.shape[0] < 2 or np.all(y == y[0]):
        raise SingleClassTrainingSet("training requires both classes present")
    if lr <= 0 or max_iters < 1 or tol < 0:
        raise DataContractError("lr must be > 0, max_iters >= 1, tol >= 0")

    theta = np.zeros(4, dtype=np.float64)
    m = X.shape[0]
    # X.T as its own contiguous array: the gradient matmul runs every
    # iteration and a strided view is measurably slower.
    XT = np.ascontiguousarray(X.T)
    h = _sigmoid_vec(X @ theta)
    prev_cost = _cost_from_h(h, y)
    if on_step is not None:
        on_step(0, prev_cost)
    for it in range(1, max_iters + 1):
        theta = theta - lr * ((XT @ (h - y)) / m)
        h = _sigmoid_vec(X @ theta)
        new_cost = _cost_from_h(h, y)
        if on_step is not None:
            on_step(it, new_cost)
        if new_cost > prev_cost + 1e-9:
            raise InternalInvariantError(
                f"cost increased at iteration {it}: {prev_cost!r} -> {new_cost!r}"
            )
        if abs(prev_cost - new_cost) < tol:
            prev_cost = new_cost
            break
        prev_cost = new_cost
    return Model(
        theta=tuple(float(t) for t in theta),
        threshold=threshold,
        version=version,
        trained_count=m,
        neutral_sgtext=neutral_sgtext,
    )


def campaign_score(model: Model, fv: FeatureVector) -> float:
    """Sigmoid of the linear score: the probability-like campaign score."""
    t = model.theta
    z = t[0] + t[1] * fv.sgqid + t[2] * fv.sgaid + t[3] * fv.sgtext
    return sigmoid(z)


def classify(model: Model, fv: FeatureVector) -> tuple[int, float]:
    """(label, score); label is 1 when score >= threshold (alert on ties)."""
    score = campaign_score(model, fv)
    return (1 if score >= model.threshold else 0), score


# Model snapshot file: flat key=value text, floats as full-precision repr.
_MODEL_FIELDS = ("version", "theta_0", "theta_1", "theta_2", "theta_3",
                 "threshold", "trained_count", "neutral_sgtext")


def write_model(model: Model, path: str | Path) -> None:
    values = {
        "version": model.version,
        "theta_0": model.theta[0],
        "theta_1": model.theta[1],
        "theta_2": model.theta[2],
        "theta_3": model.theta[3],
        "threshold": model.threshold,
        "trained_count": model.trained_count,
        "neutral_sgtext": model.neutral_sgtext,
    }
    lines = [f"{k}={values[k]!r}" for k in _MODEL_FIELDS]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_model(path: str | Path) -> Model:
    text = Path(path).read_text(encoding="utf-8")
    values: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DataContractError(f"model file line {line_no}: expected key=value")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    missing = [k for k in _MODEL_FIELDS if k not in values]
    if missing:
        raise DataContractError(f"model file missing fields: {', '.join(missing)}")
    unknown = sorted(set(values) - set(_MODEL_FIELDS))
    if unknown:
        raise DataContractError(f"model file has unknown fields: {', '.join(unknown)}")
    try:
        return Model(
            theta=(
                float(values["theta_0"]),
                float(values["theta_1"]),
                float(values["theta_2"]),
                float(values["theta_3"]),
            ),
            threshold=float(values["threshold"]),
            version=int(values["version"]),
            trained_count=int(values["trained_count"]),
            neutral_sgtext=float(values["neutral_sgtext"]),
        )
    except ValueError as exc:
        raise DataContractError(f"model file has a malformed value: {exc}") from exc
