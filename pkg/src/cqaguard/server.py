"""The two-phase scoring service.

Protocol (bodies are JSON; responses are UTF-8 JSON with sorted keys and
compact separators, so every payload has exactly one byte representation):

- POST /score      {url}                  -> cache lookup only, never scores
- POST /session    full session (no label)-> store, score, cache, alert
- POST /feedback   {url, label, token}    -> helper/admin label; may retrain
- POST /admin/retrain {token}             -> admin: train next model version
- POST /admin/rescore {token}             -> admin: refresh cached verdicts
- GET  /health                            -> liveness + current version
- GET  /model[?version=N]                 -> model inspection

Tokens map to roles (regular/helper/admin) via a static table. Submissions
may declare a legacy text encoding in the Content-Type charset parameter;
the body is decoded to UTF-8 before parsing, so stored text is always UTF-8.
Before the first trained model exists, submissions are answered with the
neutral score 0.5 and flagged cold.
"""

from __future__ import annotations

import codecs
import json
import threading
from dataclasses import dataclass, replace
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Sequence
from urllib.parse import parse_qs, urlparse

from .errors import DataContractError
from .features import feature_vector
from .logistic import Model, SingleClassTrainingSet, classify
from .sessions import (
    MalformedRecord,
    QASession,
    TimeOrderViolation,
    session_from_record,
    session_to_record,
)
from .store import (
    ROLE_ADMIN,
    ROLES,
    ConflictingContent,
    NoNewLabels,
    SessionStore,
    SessionNotFound,
    Unauthorized,
    Verdict,
)

DEFAULT_RETRAIN_EVERY = 200

_JSON_TYPE = "application/json"

_SESSION_FIELDS_REQUIRED = (
    "url", "title", "question_text", "answer_text",
    "questioner_id", "answerer_id",
    "ask_time", "answer_time", "likes", "other_answers",
)
_SESSION_FIELDS_OPTIONAL = ("category", "rating")


class _HttpReply(Exception):
    """Internal control flow: an HTTP status + JSON body to send."""

    def __init__(self, status: int, payload: dict):
        super().__init__(payload.get("error", ""))
        self.status = status
        self.payload = payload


def _reject(status: int, message: str) -> _HttpReply:
    return _HttpReply(status, {"error": message})


@dataclass(frozen=True)
class ServerConfig:
    tokens: dict[str, str]  # token -> role
    store_dir: str | None = None
    retrain_every: int = DEFAULT_RETRAIN_EVERY
    lr: float = 0.1
    max_iters: int = 20000
    tol: float = 1e-7
    min_support: int = 5
    host: str = "127.0.0.1"
    port: int = 8731


def parse_kv_file(path: str | Path) -> dict[str, str]:
    """Flat key=value config lines; blanks and # comments ignored."""
    values: dict[str, str] = {}
    for line_no, raw in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DataContractError(f"{path} line {line_no}: expected key=value")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def load_tokens(path: str | Path) -> dict[str, str]:
    """Token table: one `token role` pair per line."""
    tokens: dict[str, str] = {}
    for line_no, raw in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2 or parts[1] not in ROLES:
            raise DataContractError(
                f"{path} line {line_no}: expected '<token> <role>' with role in {ROLES}"
            )
        tokens[parts[0]] = parts[1]
    return tokens


def load_server_config(path: str | Path) -> ServerConfig:
    values = parse_kv_file(path)
    known = {
        "tokens_file", "store_dir", "retrain_every",
        "lr", "max_iters", "tol", "min_support", "host", "port",
    }
    unknown = set(values) - known
    if unknown:
        raise DataContractError(f"unknown config key(s): {sorted(unknown)}")
    if "tokens_file" not in values:
        raise DataContractError("config must set tokens_file")
    base = Path(path).parent
    tokens_path = Path(values["tokens_file"])
    if not tokens_path.is_absolute():
        tokens_path = base / tokens_path
    store_dir = values.get("store_dir")
    if store_dir is not None and not Path(store_dir).is_absolute():
        store_dir = str(base / store_dir)
    try:
        return ServerConfig(
            tokens=load_tokens(tokens_path),
            store_dir=store_dir,
            retrain_every=int(values.get("retrain_every", DEFAULT_RETRAIN_EVERY)),
            lr=float(values.get("lr", 0.1)),
            max_iters=int(values.get("max_iters", 20000)),
            tol=float(values.get("tol", 1e-7)),
            min_support=int(values.get("min_support", 5)),
            host=values.get("host", "127.0.0.1"),
            port=int(values.get("port", 8731)),
        )
    except ValueError as exc:
        raise DataContractError(f"malformed config value: {exc}") from exc


class _App:
    """Transport-independent request handling over one store."""

    def __init__(
        self,
        store: SessionStore,
        tokens: dict[str, str],
        retrain_every: int = DEFAULT_RETRAIN_EVERY,
        min_support: int = 5,
    ):
        self.store = store
        self.tokens = dict(tokens)
        self.retrain_every = retrain_every
        self.min_support = min_support
        self._retrain_guard = threading.Lock()

    # -- helpers -------------------------------------------------------- #

    def _role(self, body: dict) -> str | None:
        token = body.get("token")
        if not isinstance(token, str):
            raise _reject(400, "token must be a string")
        return self.tokens.get(token)

    def _verdict_payload(self, v: Verdict) -> dict:
        return {
            "alert": v.label == 1,
            "cold": v.cold,
            "features": list(v.features),
            "label": v.label,
            "model_version": v.model_version,
            "score": v.score,
        }

    def _score_session(self, s: QASession) -> Verdict:
        pub = self.store.published
        fv = feature_vector(
            s, pub.stats, pub.counts,
            neutral=pub.model.neutral_sgtext,
            min_support=self.min_support,
        )
        label, score = classify(pub.model, fv)
        return Verdict(
            score=score,
            label=label,
            model_version=pub.model.version,
            features=(fv.sgqid, fv.sgaid, fv.sgtext),
            cold=pub.model.version == 0,
        )

    # -- endpoints ------------------------------------------------------ #

    def score_by_url(self, body: dict) -> tuple[int, dict]:
        if set(body) != {"url"}:
            raise _reject(400, "body must be exactly {\"url\"}")
        url = body["url"]
        if not isinstance(url, str) or not url:
            raise _reject(400, "url must be a non-empty string")
        verdict = self.store.find_by_url(url)
        if verdict is None:
            return 200, {"found": False}
        return 200, {
            "found": True,
            "label": verdict.label,
            "model_version": verdict.model_version,
            "score": verdict.score,
        }

    def submit_session(self, body: dict) -> tuple[int, dict]:
        if "label" in body:
            raise _reject(400, "submissions must not carry a label")
        unknown = set(body) - set(_SESSION_FIELDS_REQUIRED) - set(
            _SESSION_FIELDS_OPTIONAL
        )
        if unknown:
            raise _reject(400, f"unknown field(s): {sorted(unknown)}")
        try:
            session = session_from_record(dict(body))
        except TimeOrderViolation as exc:
            raise _reject(422, str(exc)) from None
        except MalformedRecord as exc:
            raise _reject(400, str(exc)) from None

        cached = self.store.find_by_url(session.url)
        if cached is not None:
            stored = self.store.get_session(session.url)
            # Compare label-stripped: a human label applied since the first
            # submission must not turn an identical resubmission into a
            # conflict.
            if stored is not None and session_to_record(
                replace(stored, label=None)
            ) != session_to_record(session):
                raise _reject(409, f"conflicting content for {session.url}")
            return 200, self._verdict_payload(cached)

        verdict = self._score_session(session)
        try:
            final = self.store.submit_verdict(session, verdict)
        except ConflictingContent as exc:
            raise _reject(409, str(exc)) from None
        return 200, self._verdict_payload(final)

    def feedback(self, body: dict) -> tuple[int, dict]:
        if set(body) != {"url", "label", "token"}:
            raise _reject(400, "body must be exactly {\"url\",\"label\",\"token\"}")
        role = self._role(body)
        if role is None or role not in ("helper", "admin"):
            raise _reject(403, "not authorized to annotate")
        url, label = body["url"], body["label"]
        if not isinstance(url, str) or not url:
            raise _reject(400, "url must be a non-empty string")
        if label not in (0, 1) or isinstance(label, bool):
            raise _reject(400, "label must be 0 or 1")
        try:
            self.store.set_label(url, label, annotator_role=role)
        except SessionNotFound:
            raise _reject(404, f"unknown url: {url}") from None
        except Unauthorized as exc:  # defense in depth; role checked above
            raise _reject(403, str(exc)) from None
        retrained = self._maybe_auto_retrain()
        return 200, {
            "accepted": True,
            "model_version": self.store.published.model.version,
            "retrained": retrained,
        }

    def _maybe_auto_retrain(self) -> bool:
        if self.retrain_every <= 0:
            return False
        if self.store.labels_since_retrain() < self.retrain_every:
            return False
        with self._retrain_guard:
            if self.store.labels_since_retrain() < self.retrain_every:
                return False
            try:
                self.store.retrain()
                return True
            except (NoNewLabels, SingleClassTrainingSet):
                return False

    def admin_retrain(self, body: dict) -> tuple[int, dict]:
        if set(body) != {"token"}:
            raise _reject(400, "body must be exactly {\"token\"}")
        if self._role(body) != ROLE_ADMIN:
            raise _reject(403, "not authorized to retrain")
        try:
            model = self.store.retrain()
        except NoNewLabels as exc:
            raise _reject(409, str(exc)) from None
        except SingleClassTrainingSet as exc:
            raise _reject(409, str(exc)) from None
        return 200, {"training_size": model.trained_count, "version": model.version}

    def admin_rescore(self, body: dict) -> tuple[int, dict]:
        if set(body) != {"token"}:
            raise _reject(400, "body must be exactly {\"token\"}")
        if self._role(body) != ROLE_ADMIN:
            raise _reject(403, "not authorized to rescore")
        n = self.store.rescore_all()
        return 200, {
            "model_version": self.store.published.model.version,
            "rescored": n,
        }

    def health(self) -> tuple[int, dict]:
        return 200, {
            "model_version": self.store.published.model.version,
            "sessions": self.store.session_count(),
            "status": "ok",
        }

    def model_info(self, query: dict) -> tuple[int, dict]:
        if set(query) - {"version"}:
            raise _reject(400, "unknown query parameter")
        if "version" in query:
            try:
                version = int(query["version"][0])
            except ValueError:
                raise _reject(400, "version must be an integer") from None
            model = self.store.get_model(version)
        else:
            model = self.store.published.model
            if model.version == 0:
                model = None
        if model is None:
            raise _reject(404, "no such model version")
        return 200, _model_payload(model)


def _model_payload(m: Model) -> dict:
    return {
        "neutral_sgtext": m.neutral_sgtext,
        "theta": list(m.theta),
        "threshold": m.threshold,
        "trained_count": m.trained_count,
        "version": m.version,
    }


def _decode_body(handler: BaseHTTPRequestHandler, require_charset: bool) -> dict:
    length = handler.headers.get("Content-Length")
    if length is None:
        raise _reject(400, "missing request body")
    try:
        n = int(length)
    except ValueError:
        raise _reject(400, "bad Content-Length") from None
    raw = handler.rfile.read(n)

    content_type = handler.headers.get("Content-Type")
    charset = None
    if content_type is not None:
        media, _, rest = content_type.partition(";")
        if media.strip().lower() != _JSON_TYPE:
            raise _reject(415, f"unsupported media type: {media.strip()!r}")
        for param in rest.split(";"):
            key, _, value = param.strip().partition("=")
            if key.lower() == "charset" and value:
                charset = value.strip().strip('"').lower()
    if charset is None:
        if require_charset:
            raise _reject(415, "text encoding must be declared via charset")
        charset = "utf-8"
    try:
        codec = codecs.lookup(charset)
    except LookupError:
        raise _reject(415, f"unknown charset: {charset!r}") from None
    try:
        text = raw.decode(codec.name)
    except (UnicodeDecodeError, ValueError) as exc:
        raise _reject(415, f"body not decodable as {charset}: {exc}") from None
    try:
        body = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _reject(400, f"invalid json: {exc}") from None
    if not isinstance(body, dict):
        raise _reject(400, "body must be a json object")
    return body


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "cqaguard"

    @property
    def app(self) -> _App:
        return self.server.app  # type: ignore[attr-defined]

    def log_message(self, format: str, *args) -> None:  # silence default stderr
        pass

    def _send(self, status: int, payload: dict) -> None:
        body = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode(
            "utf-8"
        )
        if status >= 400:
            # The request body may not have been consumed; do not let its
            # bytes masquerade as the next request on this connection.
            self.close_connection = True
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _run(self, fn) -> None:
        try:
            status, payload = fn()
        except _HttpReply as reply:
            status, payload = reply.status, reply.payload
        except DataContractError as exc:
            status, payload = 400, {"error": str(exc)}
        except Exception as exc:  # pragma: no cover - last-resort guard
            status, payload = 500, {"error": f"internal error: {exc}"}
        self._send(status, payload)

    def do_GET(self) -> None:
        parsed = urlparse(self.path)
        if parsed.path == "/health":
            self._run(self.app.health)
        elif parsed.path == "/model":
            self._run(lambda: self.app.model_info(parse_qs(parsed.query)))
        else:
            self._send(404, {"error": "not found"})

    def do_POST(self) -> None:
        parsed = urlparse(self.path)
        routes = {
            "/score": (self.app.score_by_url, False),
            "/session": (self.app.submit_session, True),
            "/feedback": (self.app.feedback, False),
            "/admin/retrain": (self.app.admin_retrain, False),
            "/admin/rescore": (self.app.admin_rescore, False),
        }
        route = routes.get(parsed.path)
        if route is None:
            self._send(404, {"error": "not found"})
            return
        endpoint, require_charset = route

        def run():
            body = _decode_body(self, require_charset)
            return endpoint(body)

        self._run(run)


class CampaignServer:
    """Owns the HTTP listener; usable foreground (serve_forever) or as a
    background fixture (start/stop)."""

    def __init__(
        self,
        store: SessionStore,
        tokens: dict[str, str],
        host: str = "127.0.0.1",
        port: int = 0,
        retrain_every: int = DEFAULT_RETRAIN_EVERY,
        min_support: int = 5,
    ):
        self.app = _App(
            store, tokens, retrain_every=retrain_every, min_support=min_support
        )
        self.httpd = ThreadingHTTPServer((host, port), _Handler)
        self.httpd.daemon_threads = True
        self.httpd.app = self.app  # type: ignore[attr-defined]
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        host, port = self.httpd.server_address[:2]
        return str(host), int(port)

    @property
    def base_url(self) -> str:
        host, port = self.address
        return f"http://{host}:{port}"

    def serve_forever(self) -> None:
        self.httpd.serve_forever()

    def start(self) -> "CampaignServer":
        self._thread = threading.Thread(target=self.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None


def build_server(
    config: ServerConfig,
    host: str | None = None,
    port: int | None = None,
    preload: Sequence[QASession] = (),
) -> CampaignServer:
    """Construct store + server from config; optionally preload a corpus and
    train the first model when the preload carries labels."""
    store = SessionStore(
        root=config.store_dir,
        lr=config.lr,
        max_iters=config.max_iters,
        tol=config.tol,
        min_support=config.min_support,
    )
    for s in preload:
        store.upsert_session(s)
    if store.labels_since_retrain() > 0:
        store.retrain()
    return CampaignServer(
        store,
        config.tokens,
        host=host if host is not None else config.host,
        port=port if port is not None else config.port,
        retrain_every=config.retrain_every,
        min_support=config.min_support,
    )
