"""Spam-grade features: questioner id, answerer id, and text.

The id features are campaign ratios of a user's labeled history; the text
feature averages a rarity-weighted campaign affinity over the session's
distinct words. Training rows are computed leave-one-out: the session's own
contribution is subtracted arithmetically, so the shared count state is
never mutated while building a training set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataContractError
from .sessions import QASession
from .text import UserSpamCounts, WordStats, distinct_words

FEATURE_NAMES = ("sg_qid", "sg_aid", "sg_text")

DEFAULT_MIN_SUPPORT = 5

# Empty-text value for a database with no labeled sessions; retrains replace
# it with the mean sg_text over the labeled pool (see neutral_sg_text).
DEFAULT_NEUTRAL = 0.0


class NotInDatabase(DataContractError):
    """Leave-one-out asked for a session whose label was never counted."""


@dataclass(frozen=True)
class FeatureVector:
    """The (sg_qid, sg_aid, sg_text) triple for one session."""

    sgqid: float
    sgaid: float
    sgtext: float

    def as_row(self) -> list[float]:
        """Design-matrix row: a leading 1 for the intercept, then the triple."""
        return [1.0, self.sgqid, self.sgaid, self.sgtext]


def sg_ratio(c0: int, c1: int, min_support: int = DEFAULT_MIN_SUPPORT) -> float:
    """Campaign ratio of a user's labeled history, with two fallbacks.

    Below ``min_support`` total observations the history says nothing and
    the ratio pins to 0.5. With support but zero campaign hits, a half count
    keeps the ratio positive: 0.5/(c0 + 0.5). The support check applies
    first, on the raw total.
    """
    if c0 < 0 or c1 < 0:
        raise DataContractError(f"negative counts: c0={c0}, c1={c1}")
    total = c0 + c1
    if total < min_support:
        return 0.5
    if c1 == 0:
        return 0.5 / (c0 + 0.5)
    return c1 / total


def sg_word(total_normal: int, n_i: int, total_campaign: int, s_i: int) -> float:
    """Rarity-weighted campaign affinity of one word.

    ln((N+1)/(n_i+1)) * (s_i+1)/(S+1), where N/S are the normal and campaign
    session totals and n_i/s_i the word's per-class session counts. Natural
    logarithm; the +1 terms keep every input in domain.
    """
    if min(n_i, s_i, total_normal, total_campaign) < 0:
        raise DataContractError("negative word counts")
    if n_i > total_normal or s_i > total_campaign:
        raise DataContractError("word counts exceed class totals")
    return (
        math.log((total_normal + 1) / (n_i + 1))
        * (s_i + 1)
        / (total_campaign + 1)
    )


@dataclass(frozen=True)
class _StateView:
    """Count state as seen for one session, possibly with itself removed."""

    stats: WordStats
    counts: UserSpamCounts
    own_label: int | None  # None: full state, nothing subtracted
    own_words: frozenset[str]
    questioner_id: str
    answerer_id: str

    def questioner_counts(self) -> tuple[int, int]:
        q0, q1 = self.counts.questioner_counts(self.questioner_id)
        if self.own_label == 1:
            q1 -= 1
        elif self.own_label == 0:
            q0 -= 1
        if q0 < 0 or q1 < 0:
            raise NotInDatabase("questioner contribution not present")
        return q0, q1

    def answerer_counts(self) -> tuple[int, int]:
        a0, a1 = self.counts.answerer_counts(self.answerer_id)
        if self.own_label == 1:
            a1 -= 1
        elif self.own_label == 0:
            a0 -= 1
        if a0 < 0 or a1 < 0:
            raise NotInDatabase("answerer contribution not present")
        return a0, a1

    def totals(self) -> tuple[int, int]:
        n, s = self.stats.total_normal, self.stats.total_campaign
        if self.own_label == 1:
            s -= 1
        elif self.own_label == 0:
            n -= 1
        if n < 0 or s < 0:
            raise NotInDatabase("session total contribution not present")
        return n, s

    def word_counts(self, word: str) -> tuple[int, int]:
        n_i, s_i = self.stats.word_counts(word)
        if word in self.own_words:
            if self.own_label == 1:
                s_i -= 1
            elif self.own_label == 0:
                n_i -= 1
        if n_i < 0 or s_i < 0:
            raise NotInDatabase(f"word contribution for {word!r} not present")
        return n_i, s_i


def _make_view(
    s: QASession,
    stats: WordStats,
    counts: UserSpamCounts,
    exclude_self: bool,
    words: set[str] | frozenset[str],
) -> _StateView:
    own_label: int | None = None
    if exclude_self:
        if s.label is None:
            raise DataContractError("exclude_self requires a labeled session")
        own_label = s.label
    return _StateView(
        stats=stats,
        counts=counts,
        own_label=own_label,
        own_words=frozenset(words) if own_label is not None else frozenset(),
        questioner_id=s.questioner_id,
        answerer_id=s.answerer_id,
    )


def _sg_text_of_view(
    view: _StateView, words: set[str] | frozenset[str], neutral: float
) -> float:
    if not words:
        return neutral
    total_normal, total_campaign = view.totals()
    acc = 0.0
    # Sorted so the float summation order (and thus the exact result) does
    # not depend on set iteration order or the process hash seed.
    for w in sorted(words):
        n_i, s_i = view.word_counts(w)
        acc += sg_word(total_normal, n_i, total_campaign, s_i)
    return acc / len(words)


def sg_text(
    s: QASession,
    stats: WordStats,
    neutral: float = DEFAULT_NEUTRAL,
    words: set[str] | frozenset[str] | None = None,
) -> float:
    """Mean word affinity over the session's distinct words; empty -> neutral."""
    if words is None:
        words = distinct_words(s)
    view = _make_view(s, stats, UserSpamCounts(), False, words)
    return _sg_text_of_view(view, words, neutral)


def feature_vector(
    s: QASession,
    stats: WordStats,
    counts: UserSpamCounts,
    neutral: float = DEFAULT_NEUTRAL,
    exclude_self: bool = False,
    min_support: int = DEFAULT_MIN_SUPPORT,
    words: set[str] | frozenset[str] | None = None,
) -> FeatureVector:
    """The (sg_qid, sg_aid, sg_text) triple for one session.

    With ``exclude_self`` the session's own labeled contribution is removed
    from every count before computing — this is how training rows avoid
    seeing their own label. The session must then be labeled and present in
    the state, otherwise NotInDatabase is raised. ``words`` may carry a
    precomputed distinct_words(s) to skip re-tokenizing.
    """
    if words is None:
        words = distinct_words(s)
    view = _make_view(s, stats, counts, exclude_self, words)
    q0, q1 = view.questioner_counts()
    a0, a1 = view.answerer_counts()
    return FeatureVector(
        sgqid=sg_ratio(q0, q1, min_support),
        sgaid=sg_ratio(a0, a1, min_support),
        sgtext=_sg_text_of_view(view, words, neutral),
    )


def neutral_sg_text(
    sessions: list[QASession],
    stats: WordStats,
    words_by_url: dict[str, frozenset[str]] | None = None,
) -> float:
    """Empty-text stand-in: mean sg_text over the labeled sessions.

    Computed against the full state. Labeled sessions that are themselves
    empty cannot contribute (their sg_text is the value being defined) and
    are skipped; with no contributing session the value is DEFAULT_NEUTRAL.
    """
    acc = 0.0
    n = 0
    for s in sessions:
        if s.label is None:
            continue
        words = (
            words_by_url[s.url] if words_by_url is not None else distinct_words(s)
        )
        if not words:
            continue
        acc += sg_text(s, stats, neutral=0.0, words=words)
        n += 1
    return acc / n if n else DEFAULT_NEUTRAL


def build_training_set(
    sessions: list[QASession],
    stats: WordStats,
    counts: UserSpamCounts,
    min_support: int = DEFAULT_MIN_SUPPORT,
    words_by_url: dict[str, frozenset[str]] | None = None,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Leave-one-out design matrix over the labeled sessions.

    Returns (X, y, neutral): X is (m, 4) float64 whose first column is all
    ones, y is (m,) float64 labels in session order, and neutral is the
    empty-text value consistent with the rows (mean full-state sg_text over
    the labeled pool, recomputed here exactly as a retrain would).
    """
    labeled = [s for s in sessions if s.label is not None]
    if words_by_url is None:
        words_by_url = {s.url: frozenset(distinct_words(s)) for s in labeled}
    neutral = neutral_sg_text(labeled, stats, words_by_url)
    rows = [
        feature_vector(
            s,
            stats,
            counts,
            neutral=neutral,
            exclude_self=True,
            min_support=min_support,
            words=words_by_url[s.url],
        ).as_row()
        for s in labeled
    ]
    X = np.array(rows, dtype=np.float64).reshape(len(labeled), 4)
    y = np.array([float(s.label) for s in labeled], dtype=np.float64)
    return X, y, neutral
