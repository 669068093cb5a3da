"""Durable session/label/model state with single-writer concurrency.

All mutations serialize through one lock. Scoring never touches the live
count state: it reads ``published``, an immutable (model, stats, counts)
triple that is swapped atomically at each retrain, so concurrent readers see
either the old trained state or the new one, never a mix.

On disk a store is one directory: an append-only operation log of
length-prefixed UTF-8 JSON records, plus a compacted snapshot file whose
first line is the SHA-256 of the JSON body that follows. Opening a store on
an existing directory restores the snapshot and replays the log; a torn
final log record (a crash artifact) is dropped, a damaged snapshot is not
tolerated.
"""

from __future__ import annotations

import hashlib
import json
import struct
import threading
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DataContractError
from .features import (
    DEFAULT_MIN_SUPPORT,
    FeatureVector,
    build_training_set,
    feature_vector,
)
from .logistic import (
    DEFAULT_LR,
    DEFAULT_MAX_ITERS,
    DEFAULT_TOL,
    Model,
    classify,
    train,
    zero_model,
)
from .sessions import (
    QASession,
    session_from_record,
    session_to_record,
    validate_session,
)
from .text import UserSpamCounts, WordStats, apply_label

ROLE_REGULAR = "regular"
ROLE_HELPER = "helper"
ROLE_ADMIN = "admin"
ROLES = (ROLE_REGULAR, ROLE_HELPER, ROLE_ADMIN)
ANNOTATOR_ROLES = (ROLE_HELPER, ROLE_ADMIN)

_SNAPSHOT_FILE = "snapshot.dat"
_OPLOG_FILE = "oplog.bin"
_LEN = struct.Struct(">Q")


class ConflictingContent(DataContractError):
    """Upsert of a url that exists with different field values."""


class SessionNotFound(DataContractError):
    """Operation referenced a url with no stored session."""


class Unauthorized(DataContractError):
    """The caller's role does not permit the operation."""


class CorruptSnapshot(DataContractError):
    """Snapshot file failed its integrity check."""


class NoNewLabels(DataContractError):
    """Retrain requested but no label changed since the last one."""


@dataclass(frozen=True)
class Verdict:
    """A cached scoring result for one url."""

    score: float
    label: int
    model_version: int
    features: tuple[float, float, float]
    cold: bool


@dataclass(frozen=True)
class PublishedState:
    """What scorers read: one consistent trained state."""

    model: Model
    stats: WordStats
    counts: UserSpamCounts


@dataclass(frozen=True)
class StoreSnapshot:
    """Point-in-time consistent copy of the whole store state."""

    sessions: tuple[QASession, ...]
    scores: dict[str, Verdict]
    stats: WordStats
    counts: UserSpamCounts
    models: tuple[Model, ...]
    labels_since_retrain: int
    published_version: int


class SessionStore:
    """Sessions keyed by url, their labels, count state, and model history."""

    def __init__(
        self,
        root: str | Path | None = None,
        lr: float = DEFAULT_LR,
        max_iters: int = DEFAULT_MAX_ITERS,
        tol: float = DEFAULT_TOL,
        min_support: int = DEFAULT_MIN_SUPPORT,
    ) -> None:
        self._lock = threading.RLock()
        self._sessions: dict[str, QASession] = {}
        self._scores: dict[str, Verdict] = {}
        self._stats = WordStats()
        self._counts = UserSpamCounts()
        self._models: list[Model] = []
        self._labels_since_retrain = 0
        self._published = PublishedState(zero_model(0), WordStats(), UserSpamCounts())
        self._lr = lr
        self._max_iters = max_iters
        self._tol = tol
        self._min_support = min_support
        self._root: Path | None = None
        self._log = None
        if root is not None:
            self._attach(Path(root))

    # ------------------------------------------------------------------ #
    # persistence plumbing

    def _attach(self, root: Path) -> None:
        root.mkdir(parents=True, exist_ok=True)
        self._root = root
        snap = root / _SNAPSHOT_FILE
        if snap.exists():
            self._load_snapshot_bytes(snap.read_bytes())
        log_path = root / _OPLOG_FILE
        good = 0
        if log_path.exists():
            raw = log_path.read_bytes()
            for record, end in _iter_log(raw):
                self._apply_record(record)
                good = end
            if good != len(raw):
                with open(log_path, "r+b") as fh:
                    fh.truncate(good)
        self._log = open(log_path, "ab")

    def close(self) -> None:
        with self._lock:
            if self._log is not None:
                self._log.close()
                self._log = None

    def _append(self, record: dict) -> None:
        if self._log is None:
            return
        data = json.dumps(record, sort_keys=True, separators=(",", ":")).encode("utf-8")
        self._log.write(_LEN.pack(len(data)) + data)
        self._log.flush()

    def _apply_record(self, record: dict) -> None:
        """Replay one oplog record (mutations without re-logging)."""
        op = record.get("op")
        if op == "upsert":
            self._upsert_locked(session_from_record(record["session"]), log=False)
        elif op == "set_label":
            self._set_label_locked(record["url"], record["label"], log=False)
        elif op == "verdict":
            self._scores[record["url"]] = _verdict_from_record(record["verdict"])
        elif op == "model":
            model = _model_from_record(record["model"])
            self._models.append(model)
            self._publish(model)
            self._labels_since_retrain = 0
        else:
            raise DataContractError(f"unknown oplog record type: {op!r}")

    def _publish(self, model: Model) -> None:
        self._published = PublishedState(
            model=model, stats=self._stats.copy(), counts=self._counts.copy()
        )

    # ------------------------------------------------------------------ #
    # reads

    @property
    def published(self) -> PublishedState:
        """The current consistent scoring state; safe without the lock."""
        return self._published

    def get_session(self, url: str) -> QASession | None:
        with self._lock:
            return self._sessions.get(url)

    def find_by_url(self, url: str) -> Verdict | None:
        """Cached verdict for a url, or None when never scored."""
        with self._lock:
            return self._scores.get(url)

    def session_count(self) -> int:
        with self._lock:
            return len(self._sessions)

    def labeled_sessions(self) -> list[QASession]:
        with self._lock:
            return [s for s in self._sessions.values() if s.label is not None]

    def model_history(self) -> list[Model]:
        with self._lock:
            return list(self._models)

    def get_model(self, version: int) -> Model | None:
        with self._lock:
            for m in self._models:
                if m.version == version:
                    return m
            return None

    # ------------------------------------------------------------------ #
    # mutations (single writer)

    def upsert_session(self, s: QASession) -> QASession:
        with self._lock:
            return self._upsert_locked(s, log=True)

    def _upsert_locked(self, s: QASession, log: bool) -> QASession:
        validate_session(s)
        existing = self._sessions.get(s.url)
        if existing is None:
            self._sessions[s.url] = s
            if s.label is not None:
                apply_label(self._stats, self._counts, s, s.label)
                self._labels_since_retrain += 1
            if log:
                self._append({"op": "upsert", "session": session_to_record(s)})
            return s
        if session_to_record(replace(existing, label=None)) != session_to_record(
            replace(s, label=None)
        ):
            raise ConflictingContent(s.url)
        if s.label is None or s.label == existing.label:
            return existing
        if existing.label is not None:
            raise ConflictingContent(
                f"{s.url}: conflicting labels {existing.label} vs {s.label}"
            )
        return self._set_label_locked(s.url, s.label, log=log)

    def set_label(self, url: str, label: int, annotator_role: str) -> QASession:
        """Record a human label; replaces a previous label exactly."""
        if annotator_role not in ANNOTATOR_ROLES:
            raise Unauthorized(f"role {annotator_role!r} may not annotate")
        if isinstance(label, bool) or label not in (0, 1):
            raise DataContractError(f"label must be 0 or 1, got {label!r}")
        with self._lock:
            return self._set_label_locked(url, label, log=True)

    def _set_label_locked(self, url: str, label: int, log: bool) -> QASession:
        s = self._sessions.get(url)
        if s is None:
            raise SessionNotFound(url)
        if s.label == label:
            return s
        if s.label is not None:
            apply_label(self._stats, self._counts, s, s.label, sign=-1)
        relabeled = replace(s, label=label)
        apply_label(self._stats, self._counts, relabeled, label)
        self._sessions[url] = relabeled
        self._labels_since_retrain += 1
        if log:
            self._append({"op": "set_label", "url": url, "label": label})
        return relabeled

    def submit_verdict(self, s: QASession, verdict: Verdict) -> Verdict:
        """Store a session with its verdict; an already-cached verdict wins
        (resubmissions return the original, bit-identical)."""
        with self._lock:
            self._upsert_locked(s, log=True)
            cached = self._scores.get(s.url)
            if cached is not None:
                return cached
            self._scores[s.url] = verdict
            self._append(
                {"op": "verdict", "url": s.url, "verdict": _verdict_to_record(verdict)}
            )
            return verdict

    def labels_since_retrain(self) -> int:
        with self._lock:
            return self._labels_since_retrain

    def retrain(self, new_labeled: Sequence[QASession] = ()) -> Model:
        """Absorb new labeled sessions, train the next model version, and
        atomically publish it with a consistent copy of the count state."""
        with self._lock:
            for s in new_labeled:
                if s.label is None:
                    raise DataContractError(
                        f"retrain given an unlabeled session: {s.url}"
                    )
                self._upsert_locked(s, log=True)
            if self._labels_since_retrain == 0:
                raise NoNewLabels("no label changes since the last retrain")
            labeled = [s for s in self._sessions.values() if s.label is not None]
            X, y, neutral = build_training_set(
                labeled, self._stats, self._counts, min_support=self._min_support
            )
            version = self._models[-1].version + 1 if self._models else 1
            model = train(
                X, y,
                lr=self._lr, max_iters=self._max_iters, tol=self._tol,
                version=version, neutral_sgtext=neutral,
            )
            self._models.append(model)
            self._publish(model)
            self._labels_since_retrain = 0
            self._append({"op": "model", "model": _model_to_record(model)})
            return model

    def rescore_all(self) -> int:
        """Recompute every cached verdict against the published state."""
        with self._lock:
            pub = self._published
            cold = pub.model.version == 0
            for url in list(self._scores):
                s = self._sessions[url]
                fv = feature_vector(
                    s, pub.stats, pub.counts,
                    neutral=pub.model.neutral_sgtext,
                    min_support=self._min_support,
                )
                label, score = classify(pub.model, fv)
                verdict = Verdict(
                    score=score,
                    label=label,
                    model_version=pub.model.version,
                    features=(fv.sgqid, fv.sgaid, fv.sgtext),
                    cold=cold,
                )
                self._scores[url] = verdict
                self._append(
                    {"op": "verdict", "url": url, "verdict": _verdict_to_record(verdict)}
                )
            return len(self._scores)

    # ------------------------------------------------------------------ #
    # snapshot / persist / restore

    def snapshot(self) -> StoreSnapshot:
        with self._lock:
            return StoreSnapshot(
                sessions=tuple(self._sessions.values()),
                scores=dict(self._scores),
                stats=self._stats.copy(),
                counts=self._counts.copy(),
                models=tuple(self._models),
                labels_since_retrain=self._labels_since_retrain,
                published_version=self._published.model.version,
            )

    def _snapshot_payload(self) -> dict:
        pub = self._published
        return {
            "sessions": [session_to_record(s) for s in self._sessions.values()],
            "scores": {
                url: _verdict_to_record(v) for url, v in self._scores.items()
            },
            "stats": _stats_to_record(self._stats),
            "counts": _counts_to_record(self._counts),
            "models": [_model_to_record(m) for m in self._models],
            "labels_since_retrain": self._labels_since_retrain,
            "published": {
                "model_version": pub.model.version,
                "stats": _stats_to_record(pub.stats),
                "counts": _counts_to_record(pub.counts),
            },
        }

    def persist(self, path: str | Path | None = None) -> Path:
        """Write a compacted, checksummed snapshot. When writing into the
        store's own directory the operation log is truncated afterwards,
        since the snapshot now carries everything."""
        with self._lock:
            target = Path(path) if path is not None else self._root
            if target is None:
                raise DataContractError("in-memory store: persist needs a path")
            target.mkdir(parents=True, exist_ok=True)
            body = json.dumps(
                self._snapshot_payload(), sort_keys=True, separators=(",", ":")
            ).encode("utf-8")
            digest = hashlib.sha256(body).hexdigest()
            tmp = target / (_SNAPSHOT_FILE + ".tmp")
            tmp.write_bytes(digest.encode("ascii") + b"\n" + body)
            tmp.replace(target / _SNAPSHOT_FILE)
            if self._root is not None and target == self._root and self._log is not None:
                self._log.truncate(0)
                self._log.seek(0)
            return target / _SNAPSHOT_FILE

    def _load_snapshot_bytes(self, raw: bytes) -> None:
        newline = raw.find(b"\n")
        if newline < 0:
            raise CorruptSnapshot("snapshot has no checksum header")
        digest, body = raw[:newline], raw[newline + 1 :]
        if hashlib.sha256(body).hexdigest().encode("ascii") != digest:
            raise CorruptSnapshot("snapshot checksum mismatch")
        try:
            payload = json.loads(body.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise CorruptSnapshot(f"snapshot body unreadable: {exc}") from exc
        self._sessions = {}
        for record in payload["sessions"]:
            s = session_from_record(record)
            self._sessions[s.url] = s
        self._scores = {
            url: _verdict_from_record(v) for url, v in payload["scores"].items()
        }
        self._stats = _stats_from_record(payload["stats"])
        self._counts = _counts_from_record(payload["counts"])
        self._models = [_model_from_record(m) for m in payload["models"]]
        self._labels_since_retrain = int(payload["labels_since_retrain"])
        pub = payload["published"]
        version = int(pub["model_version"])
        model = zero_model(0)
        for m in self._models:
            if m.version == version:
                model = m
        self._published = PublishedState(
            model=model,
            stats=_stats_from_record(pub["stats"]),
            counts=_counts_from_record(pub["counts"]),
        )

    @classmethod
    def restore(cls, path: str | Path, **kwargs) -> "SessionStore":
        """Open a store directory: load its snapshot and replay its log."""
        return cls(root=path, **kwargs)


# ---------------------------------------------------------------------- #
# record codecs


def _iter_log(raw: bytes) -> Iterable[tuple[dict, int]]:
    offset = 0
    while offset + _LEN.size <= len(raw):
        (length,) = _LEN.unpack_from(raw, offset)
        end = offset + _LEN.size + length
        if end > len(raw):
            return  # torn tail from a crash; callers truncate to last good
        yield json.loads(raw[offset + _LEN.size : end].decode("utf-8")), end
        offset = end


def _model_to_record(m: Model) -> dict:
    return {
        "theta": list(m.theta),
        "threshold": m.threshold,
        "version": m.version,
        "trained_count": m.trained_count,
        "neutral_sgtext": m.neutral_sgtext,
    }


def _model_from_record(record: dict) -> Model:
    return Model(
        theta=tuple(float(t) for t in record["theta"]),
        threshold=float(record["threshold"]),
        version=int(record["version"]),
        trained_count=int(record["trained_count"]),
        neutral_sgtext=float(record["neutral_sgtext"]),
    )


def _verdict_to_record(v: Verdict) -> dict:
    return {
        "score": v.score,
        "label": v.label,
        "model_version": v.model_version,
        "features": list(v.features),
        "cold": v.cold,
    }


def _verdict_from_record(record: dict) -> Verdict:
    return Verdict(
        score=float(record["score"]),
        label=int(record["label"]),
        model_version=int(record["model_version"]),
        features=tuple(float(x) for x in record["features"]),
        cold=bool(record["cold"]),
    )


def _stats_to_record(stats: WordStats) -> dict:
    return {
        "per_word": {w: list(pair) for w, pair in stats.per_word.items()},
        "total_normal": stats.total_normal,
        "total_campaign": stats.total_campaign,
    }


def _stats_from_record(record: dict) -> WordStats:
    return WordStats(
        per_word={w: [int(a), int(b)] for w, (a, b) in record["per_word"].items()},
        total_normal=int(record["total_normal"]),
        total_campaign=int(record["total_campaign"]),
    )


def _counts_to_record(counts: UserSpamCounts) -> dict:
    return {"per_user": {u: list(v) for u, v in counts.per_user.items()}}


def _counts_from_record(record: dict) -> UserSpamCounts:
    return UserSpamCounts(
        per_user={u: [int(x) for x in v] for u, v in record["per_user"].items()}
    )
