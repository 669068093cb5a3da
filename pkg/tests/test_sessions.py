"""Session record validation, JSONL corpus IO, and ordering helpers."""

from __future__ import annotations

import json
from dataclasses import replace

import pytest

from cqaguard.errors import DataContractError
from cqaguard.sessions import (
    CAMPAIGN,
    NORMAL,
    DuplicateUrl,
    MalformedRecord,
    QASession,
    TimeOrderViolation,
    close_order,
    interval_post_time,
    load_corpus,
    session_from_record,
    session_to_record,
    validate_session,
    write_corpus,
)


def test_labels_are_the_documented_constants():
    assert CAMPAIGN == 1
    assert NORMAL == 0


def test_valid_session_passes(make_session):
    validate_session(make_session())
    validate_session(make_session(label=0))
    validate_session(make_session(label=1, category="beauty", rating="resolved"))


@pytest.mark.parametrize(
    "field,value",
    [
        ("url", ""),
        ("questioner_id", ""),
        ("answerer_id", ""),
        ("url", 3),
        ("title", None),
        ("question_text", 7),
        ("answer_text", b"bytes"),
        ("ask_time", "100"),
        ("answer_time", True),
        ("likes", -2),
        ("likes", 1.5),
        ("other_answers", -1),
        ("label", 2),
        ("label", "1"),
        ("label", True),
    ],
)
def test_invalid_field_rejected(make_session, field, value):
    s = make_session()
    bad = replace(s, **{field: value})
    with pytest.raises(DataContractError):
        validate_session(bad)


def test_invalid_record_becomes_malformed_record(make_session):
    rec = session_to_record(make_session())
    rec["likes"] = -2
    with pytest.raises(MalformedRecord) as exc:
        session_from_record(rec, line_no=4)
    assert exc.value.line_no == 4


def test_answer_before_ask_is_a_time_order_violation(make_session):
    s = make_session(ask_time=100, answer_time=99)
    with pytest.raises(TimeOrderViolation):
        validate_session(s)
    # equality is allowed: an instant answer is suspicious, not malformed
    validate_session(make_session(ask_time=100, answer_time=100))


def test_record_round_trip_preserves_everything(make_session):
    s = make_session(label=1, category="travel", rating="helpful")
    assert session_from_record(session_to_record(s)) == s


def test_record_round_trip_omits_unset_optionals(make_session):
    s = make_session()
    rec = session_to_record(s)
    assert "label" not in rec and "category" not in rec and "rating" not in rec
    assert session_from_record(rec) == s


def test_unknown_field_rejected(make_session):
    rec = session_to_record(make_session())
    rec["surprise"] = 1
    with pytest.raises(MalformedRecord):
        session_from_record(rec)


def test_missing_required_field_rejected(make_session):
    rec = session_to_record(make_session())
    del rec["answer_text"]
    with pytest.raises(MalformedRecord) as exc:
        session_from_record(rec, line_no=17)
    assert exc.value.line_no == 17


def test_null_optional_means_missing(make_session):
    rec = session_to_record(make_session())
    rec["label"] = None
    assert session_from_record(rec).label is None


def test_corpus_round_trip(tmp_path, make_session):
    sessions = [make_session(label=i % 2) for i in range(10)]
    path = tmp_path / "corpus.jsonl"
    write_corpus(sessions, path)
    assert load_corpus(path) == list(sessions)


def test_corpus_lines_are_json_objects(tmp_path, make_session):
    path = tmp_path / "corpus.jsonl"
    write_corpus([make_session(), make_session()], path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2
    for line in lines:
        assert isinstance(json.loads(line), dict)


def test_corpus_blank_lines_skipped(tmp_path, make_session):
    path = tmp_path / "corpus.jsonl"
    rec = json.dumps(session_to_record(make_session()))
    path.write_text(rec + "\n\n" + "\n", encoding="utf-8")
    assert len(load_corpus(path)) == 1


def test_corpus_bad_json_reports_line(tmp_path):
    path = tmp_path / "corpus.jsonl"
    path.write_text('{"oops": \n', encoding="utf-8")
    with pytest.raises(MalformedRecord) as exc:
        load_corpus(path)
    assert exc.value.line_no == 1


def test_corpus_duplicate_url_rejected(tmp_path, make_session):
    s = make_session()
    path = tmp_path / "corpus.jsonl"
    write_corpus([s, replace(s, likes=9)], path)
    with pytest.raises(DuplicateUrl):
        load_corpus(path)


def test_interval_post_time(make_session):
    s = make_session(ask_time=50, answer_time=80)
    assert interval_post_time(s) == 30


def test_close_order_sorts_by_answer_time_then_url(make_session):
    a = make_session(url="https://qa.example.com/b", ask_time=0, answer_time=10)
    b = make_session(url="https://qa.example.com/a", ask_time=0, answer_time=10)
    c = make_session(url="https://qa.example.com/z", ask_time=0, answer_time=5)
    ordered = close_order([a, b, c])
    assert [s.url for s in ordered] == [c.url, b.url, a.url]


def test_sessions_are_immutable(make_session):
    s = make_session()
    with pytest.raises(Exception):
        s.likes = 5  # type: ignore[misc]
