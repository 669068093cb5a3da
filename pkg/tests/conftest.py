"""Shared fixtures: a session factory and cached synthetic corpora."""

from __future__ import annotations

import itertools

import pytest

from cqaguard.sessions import QASession
from cqaguard.synth import generate_synthetic, standard_config, SyntheticConfig

_counter = itertools.count()


def _make_session(**overrides) -> QASession:
    i = next(_counter)
    fields = dict(
        url=f"https://qa.example.com/t/{i:06d}",
        title=f"question title {i}",
        question_text=f"how do i handle case {i} please advise",
        answer_text=f"you could try approach {i} and see what happens",
        questioner_id=f"asker{i % 7:02d}",
        answerer_id=f"helper{i % 5:02d}",
        ask_time=1_000_000 + 100 * i,
        answer_time=1_000_000 + 100 * i + 60,
        likes=1,
        other_answers=2,
    )
    fields.update(overrides)
    return QASession(**fields)


@pytest.fixture
def make_session():
    """Factory producing valid sessions with unique urls; kwargs override."""
    return _make_session


@pytest.fixture(scope="session")
def standard_corpus():
    """The full-size synthetic corpus used by the replay experiment."""
    return generate_synthetic(standard_config(rng_seed=7))


@pytest.fixture(scope="session")
def small_corpus():
    """A cheap 400-session labeled corpus for store/server/estimator tests."""
    cfg = SyntheticConfig(total_sessions=400, campaign_fraction=0.43, rng_seed=11)
    return generate_synthetic(cfg)
