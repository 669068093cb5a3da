"""Q&A session data model and corpus file I/O.

A corpus file is UTF-8 JSON Lines: one flat object per line whose keys are
exactly the QASession field names. ``label`` is 0/1 or absent; timestamps
are integer Unix seconds. See docs/formats.md.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable

from .errors import DataContractError

CAMPAIGN = 1
NORMAL = 0


class MalformedRecord(DataContractError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class TimeOrderViolation(DataContractError):
    def __init__(self, message: str, line_no: int | None = None):
        super().__init__(message)
        self.line_no = line_no


class DuplicateUrl(DataContractError):
    def __init__(self, url: str):
        super().__init__(f"duplicate session url: {url}")
        self.url = url


@dataclass(frozen=True)
class QASession:
    """One closed Q&A session; ``answer_text`` is the chosen best answer."""

    url: str
    title: str
    question_text: str
    answer_text: str
    questioner_id: str
    answerer_id: str
    ask_time: int
    answer_time: int
    likes: int
    other_answers: int
    category: str | None = None
    rating: str | None = None
    label: int | None = None


_REQUIRED = (
    "url",
    "title",
    "question_text",
    "answer_text",
    "questioner_id",
    "answerer_id",
    "ask_time",
    "answer_time",
    "likes",
    "other_answers",
)
_OPTIONAL = ("category", "rating", "label")
_FIELD_ORDER = tuple(f.name for f in fields(QASession))


def validate_session(s: QASession) -> None:
    """Raise on any violated QASession invariant."""
    for name in ("url", "questioner_id", "answerer_id"):
        value = getattr(s, name)
        if not isinstance(value, str) or not value:
            raise DataContractError(f"{name} must be a non-empty string")
    for name in ("title", "question_text", "answer_text"):
        if not isinstance(getattr(s, name), str):
            raise DataContractError(f"{name} must be a string")
    for name in ("ask_time", "answer_time", "likes", "other_answers"):
        value = getattr(s, name)
        if isinstance(value, bool) or not isinstance(value, int):
            raise DataContractError(f"{name} must be an integer")
    if s.likes < 0 or s.other_answers < 0:
        raise DataContractError("likes and other_answers must be non-negative")
    if s.answer_time < s.ask_time:
        raise TimeOrderViolation(
            f"answer_time {s.answer_time} precedes ask_time {s.ask_time}"
        )
    if s.label is not None and (
        isinstance(s.label, bool) or s.label not in (NORMAL, CAMPAIGN)
    ):
        raise DataContractError(f"label must be 0 or 1, got {s.label!r}")


def session_from_record(record: dict, line_no: int = 0) -> QASession:
    """Build a validated session from one parsed corpus record."""
    if not isinstance(record, dict):
        raise MalformedRecord(line_no, "record is not an object")
    unknown = set(record) - set(_FIELD_ORDER)
    if unknown:
        raise MalformedRecord(line_no, f"unknown field(s): {sorted(unknown)}")
    missing = [name for name in _REQUIRED if record.get(name) is None]
    if missing:
        raise MalformedRecord(line_no, f"missing field(s): {missing}")
    kwargs = {name: record[name] for name in _REQUIRED}
    for name in _OPTIONAL:
        kwargs[name] = record.get(name)
    session = QASession(**kwargs)
    try:
        validate_session(session)
    except TimeOrderViolation as exc:
        raise TimeOrderViolation(str(exc), line_no=line_no) from None
    except TypeError as exc:
        raise MalformedRecord(line_no, str(exc)) from None
    except DataContractError as exc:
        raise MalformedRecord(line_no, str(exc)) from None
    return session


def session_to_record(s: QASession) -> dict:
    """Inverse of session_from_record; optional fields omitted when unset."""
    record = {}
    for name in _FIELD_ORDER:
        value = getattr(s, name)
        if name in _OPTIONAL and value is None:
            continue
        record[name] = value
    return record


def load_corpus(path: str | Path) -> list[QASession]:
    """Read a corpus file, preserving file order.

    Raises MalformedRecord / TimeOrderViolation with the 1-based line number,
    and DuplicateUrl when two records share a url.
    """
    path = Path(path)
    sessions: list[QASession] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(line_no, f"invalid JSON: {exc.msg}") from None
            session = session_from_record(record, line_no)
            if session.url in seen:
                raise DuplicateUrl(session.url)
            seen.add(session.url)
            sessions.append(session)
    return sessions


def write_corpus(sessions: Iterable[QASession], path: str | Path) -> None:
    """Write sessions in corpus line format; byte-deterministic for equal input."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for s in sessions:
            fh.write(json.dumps(session_to_record(s), ensure_ascii=False))
            fh.write("\n")


def interval_post_time(s: QASession) -> int:
    """Seconds between the question being asked and the best answer arriving."""
    return s.answer_time - s.ask_time


def close_order(sessions: Iterable[QASession]) -> list[QASession]:
    """Sessions sorted by close timestamp (best-answer time), url breaking ties."""
    return sorted(sessions, key=lambda s: (s.answer_time, s.url))
