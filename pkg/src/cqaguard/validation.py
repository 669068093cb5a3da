"""Input validation helpers shared by the estimator wrappers."""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import DataContractError
from .sessions import QASession, validate_session


def check_sessions(X: Iterable[QASession], allow_empty: bool = False) -> list[QASession]:
    """Materialize and validate a collection of sessions."""
    sessions = list(X)
    if not sessions and not allow_empty:
        raise DataContractError("expected at least one session")
    for s in sessions:
        if not isinstance(s, QASession):
            raise DataContractError(f"expected QASession, got {type(s).__name__}")
        validate_session(s)
    return sessions


def check_labels(
    y: Sequence[int] | None, sessions: Sequence[QASession]
) -> list[int]:
    """Resolve labels from y or from the sessions themselves."""
    if y is None:
        labels = [s.label for s in sessions]
        if any(label is None for label in labels):
            raise DataContractError(
                "sessions are not all labeled and no y was given"
            )
        return [int(label) for label in labels]  # type: ignore[arg-type]
    labels = list(y)
    if len(labels) != len(sessions):
        raise DataContractError(
            f"y has {len(labels)} labels for {len(sessions)} sessions"
        )
    for label in labels:
        if label not in (0, 1):
            raise DataContractError(f"labels must be 0 or 1, got {label!r}")
    return [int(label) for label in labels]
