"""Scikit-learn style wrappers over the functional core.

``SpamGradeExtractor`` is a transformer whose fitted state is the label
count database. Like a target encoder, its ``fit_transform`` differs from
``fit`` + ``transform`` on the same data: training rows are produced
leave-one-out so a session's own label never leaks into its features, while
``transform`` scores against the full fitted state (the serving path).

``CampaignClassifier`` chains the extractor with the from-scratch logistic
regression and exposes the usual fit/predict/predict_proba surface.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from dataclasses import replace

from .features import (
    DEFAULT_MIN_SUPPORT,
    build_training_set,
    feature_vector,
    neutral_sg_text,
)
from .logistic import (
    DEFAULT_LR,
    DEFAULT_MAX_ITERS,
    DEFAULT_THRESHOLD,
    DEFAULT_TOL,
    campaign_score,
    train,
)
from .sessions import QASession
from .text import UserSpamCounts, WordStats, apply_label
from .validation import check_labels, check_sessions


class SpamGradeExtractor(TransformerMixin, BaseEstimator):
    """Turn sessions into (sg_qid, sg_aid, sg_text) rows.

    Parameters
    ----------
    min_support : int, default=5
        Minimum labeled history before a user ratio is trusted.
    """

    def __init__(self, min_support: int = DEFAULT_MIN_SUPPORT):
        self.min_support = min_support

    def fit(self, X, y=None):
        sessions = check_sessions(X)
        labels = check_labels(y, sessions)
        stats = WordStats()
        counts = UserSpamCounts()
        labeled = [replace(s, label=label) for s, label in zip(sessions, labels)]
        for s in labeled:
            apply_label(stats, counts, s, s.label)
        self.stats_ = stats
        self.counts_ = counts
        self.neutral_ = neutral_sg_text(labeled, stats)
        self.fitted_sessions_ = labeled
        return self

    def transform(self, X) -> np.ndarray:
        """Full-state features, as served to unlabeled/incoming sessions."""
        check_is_fitted(self, "stats_")
        sessions = check_sessions(X, allow_empty=True)
        rows = [
            feature_vector(
                s, self.stats_, self.counts_,
                neutral=self.neutral_,
                min_support=self.min_support,
            )
            for s in sessions
        ]
        return np.array(
            [[fv.sgqid, fv.sgaid, fv.sgtext] for fv in rows], dtype=np.float64
        ).reshape(len(sessions), 3)

    def fit_transform(self, X, y=None) -> np.ndarray:
        """Fit, then emit leave-one-out training rows (not fit().transform())."""
        self.fit(X, y)
        X_design, _, _ = build_training_set(
            self.fitted_sessions_, self.stats_, self.counts_,
            min_support=self.min_support,
        )
        return X_design[:, 1:]


class CampaignClassifier(ClassifierMixin, BaseEstimator):
    """Campaign-session detector: spam-grade features + logistic regression.

    Parameters mirror the trainer defaults; ``threshold`` is the campaign
    score at or above which a session is flagged.
    """

    def __init__(
        self,
        lr: float = DEFAULT_LR,
        max_iters: int = DEFAULT_MAX_ITERS,
        tol: float = DEFAULT_TOL,
        threshold: float = DEFAULT_THRESHOLD,
        min_support: int = DEFAULT_MIN_SUPPORT,
    ):
        self.lr = lr
        self.max_iters = max_iters
        self.tol = tol
        self.threshold = threshold
        self.min_support = min_support

    def fit(self, X, y=None):
        sessions = check_sessions(X)
        labels = check_labels(y, sessions)
        extractor = SpamGradeExtractor(min_support=self.min_support).fit(
            sessions, labels
        )
        X_design, y_arr, neutral = build_training_set(
            extractor.fitted_sessions_,
            extractor.stats_,
            extractor.counts_,
            min_support=self.min_support,
        )
        self.model_ = train(
            X_design, y_arr,
            lr=self.lr, max_iters=self.max_iters, tol=self.tol,
            threshold=self.threshold, version=1, neutral_sgtext=neutral,
        )
        self.extractor_ = extractor
        self.classes_ = np.array([0, 1])
        return self

    def _feature_vectors(self, X) -> list:
        check_is_fitted(self, "model_")
        sessions = check_sessions(X, allow_empty=True)
        return [
            feature_vector(
                s, self.extractor_.stats_, self.extractor_.counts_,
                neutral=self.model_.neutral_sgtext,
                min_support=self.min_support,
            )
            for s in sessions
        ]

    def predict_proba(self, X) -> np.ndarray:
        scores = np.array(
            [campaign_score(self.model_, fv) for fv in self._feature_vectors(X)],
            dtype=np.float64,
        ).reshape(-1)
        return np.column_stack([1.0 - scores, scores])

    def decision_scores(self, X) -> np.ndarray:
        """Raw campaign scores in (0,1), one per session."""
        return self.predict_proba(X)[:, 1]

    def predict(self, X) -> np.ndarray:
        scores = self.decision_scores(X)
        return (scores >= self.model_.threshold).astype(int)
