"""Tokenization and the per-word / per-user label count state.

Counting is presence-based: a word contributes once per session no matter
how often it repeats, and a user's questioner/answerer tallies move by one
per labeled session. All counts support exact removal, so applying a label
and then removing it restores the previous state bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DataContractError
from .sessions import QASession


class UnderflowViolation(DataContractError):
    """Removing a contribution that was never applied."""


# Han ideograph ranges; runs of these become overlapping character bigrams.
_CJK_RANGES = (
    (0x3400, 0x4DBF),
    (0x4E00, 0x9FFF),
    (0xF900, 0xFAFF),
    (0x20000, 0x2A6DF),
    (0x2A700, 0x2EBEF),
)


def _is_cjk(ch: str) -> bool:
    code = ord(ch)
    return any(lo <= code <= hi for lo, hi in _CJK_RANGES)


def tokenize(text: str) -> list[str]:
    """Split text into lowercased word tokens, in order of appearance.

    Alphanumeric runs split on whitespace/punctuation; each maximal run of
    CJK ideographs of length L >= 2 yields its L-1 overlapping bigrams, a
    lone ideograph yields itself.
    """
    tokens: list[str] = []
    word_run: list[str] = []
    cjk_run: list[str] = []

    def flush_word() -> None:
        if word_run:
            tokens.append("".join(word_run).lower())
            word_run.clear()

    def flush_cjk() -> None:
        if len(cjk_run) == 1:
            tokens.append(cjk_run[0])
        elif cjk_run:
            tokens.extend(a + b for a, b in zip(cjk_run, cjk_run[1:]))
        cjk_run.clear()

    for ch in text:
        if _is_cjk(ch):
            flush_word()
            cjk_run.append(ch)
        elif ch.isalnum():
            flush_cjk()
            word_run.append(ch)
        else:
            flush_word()
            flush_cjk()
    flush_word()
    flush_cjk()
    return tokens


def distinct_words(s: QASession) -> set[str]:
    """Deduplicated union of the title, question and best-answer tokens."""
    words = set(tokenize(s.title))
    words.update(tokenize(s.question_text))
    words.update(tokenize(s.answer_text))
    return words


@dataclass
class WordStats:
    """Per-word session counts split by class.

    ``per_word[w]`` is a ``[n, s]`` pair: sessions labeled normal resp.
    campaign that contain ``w``. ``total_normal``/``total_campaign`` are the
    N and S session totals. Entries that drop back to [0, 0] are removed, so
    structural equality compares states exactly.
    """

    per_word: dict[str, list[int]] = field(default_factory=dict)
    total_normal: int = 0
    total_campaign: int = 0

    def word_counts(self, word: str) -> tuple[int, int]:
        pair = self.per_word.get(word)
        return (pair[0], pair[1]) if pair else (0, 0)

    def copy(self) -> "WordStats":
        return WordStats(
            per_word={w: pair.copy() for w, pair in self.per_word.items()},
            total_normal=self.total_normal,
            total_campaign=self.total_campaign,
        )


@dataclass
class UserSpamCounts:
    """Per-user labeled-session counts: ``per_user[uid] = [q0, q1, a0, a1]``."""

    per_user: dict[str, list[int]] = field(default_factory=dict)

    def questioner_counts(self, user_id: str) -> tuple[int, int]:
        slots = self.per_user.get(user_id)
        return (slots[0], slots[1]) if slots else (0, 0)

    def answerer_counts(self, user_id: str) -> tuple[int, int]:
        slots = self.per_user.get(user_id)
        return (slots[2], slots[3]) if slots else (0, 0)

    def copy(self) -> "UserSpamCounts":
        return UserSpamCounts(
            per_user={uid: slots.copy() for uid, slots in self.per_user.items()}
        )


def apply_label(
    stats: WordStats,
    counts: UserSpamCounts,
    s: QASession,
    label: int,
    sign: int = 1,
    words: set[str] | frozenset[str] | None = None,
) -> None:
    """Add (sign=+1) or exactly remove (sign=-1) one labeled session.

    ``words`` may carry a precomputed distinct_words(s) to skip re-tokenizing.
    Underflow is checked before any mutation, so a failed removal leaves the
    state untouched.
    """
    if label not in (0, 1):
        raise DataContractError(f"label must be 0 or 1, got {label!r}")
    if sign not in (1, -1):
        raise DataContractError(f"sign must be +1 or -1, got {sign!r}")
    if words is None:
        words = distinct_words(s)

    cls = label  # index into [n, s] pairs
    if sign < 0:
        total = stats.total_campaign if label == 1 else stats.total_normal
        if total < 1:
            raise UnderflowViolation("class session total would go negative")
        for w in words:
            if stats.word_counts(w)[cls] < 1:
                raise UnderflowViolation(f"word count for {w!r} would go negative")
        q_slot, a_slot = cls, 2 + cls
        if counts.per_user.get(s.questioner_id, [0, 0, 0, 0])[q_slot] < 1:
            raise UnderflowViolation("questioner count would go negative")
        if counts.per_user.get(s.answerer_id, [0, 0, 0, 0])[a_slot] < 1:
            raise UnderflowViolation("answerer count would go negative")

    if label == 1:
        stats.total_campaign += sign
    else:
        stats.total_normal += sign
    for w in words:
        pair = stats.per_word.setdefault(w, [0, 0])
        pair[cls] += sign
        if pair[0] == 0 and pair[1] == 0:
            del stats.per_word[w]

    for uid, slot in ((s.questioner_id, cls), (s.answerer_id, 2 + cls)):
        slots = counts.per_user.setdefault(uid, [0, 0, 0, 0])
        slots[slot] += sign
        if slots == [0, 0, 0, 0]:
            del counts.per_user[uid]


def build_state(sessions) -> tuple[WordStats, UserSpamCounts]:
    """Fresh count state from labeled sessions; unlabeled ones are skipped."""
    stats = WordStats()
    counts = UserSpamCounts()
    for s in sessions:
        if s.label is not None:
            apply_label(stats, counts, s, s.label)
    return stats, counts
