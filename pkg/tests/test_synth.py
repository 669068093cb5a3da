"""Synthetic corpus generator: determinism, composition, and validity."""

from __future__ import annotations

import pytest

from cqaguard.sessions import validate_session, write_corpus
from cqaguard.synth import (
    InvalidConfig,
    SyntheticConfig,
    generate_synthetic,
    standard_config,
)


def _cfg(**overrides):
    base = dict(total_sessions=300, campaign_fraction=0.4, rng_seed=21)
    base.update(overrides)
    return SyntheticConfig(**base)


def test_same_seed_gives_byte_identical_corpora(tmp_path):
    a = generate_synthetic(_cfg())
    b = generate_synthetic(_cfg())
    assert a == b
    pa, pb = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    write_corpus(a, pa)
    write_corpus(b, pb)
    assert pa.read_bytes() == pb.read_bytes()


def test_different_seeds_differ():
    assert generate_synthetic(_cfg()) != generate_synthetic(_cfg(rng_seed=22))


def test_standard_config_composition():
    cfg = standard_config(rng_seed=7)
    assert cfg.total_sessions == 4998
    corpus = generate_synthetic(cfg)
    assert len(corpus) == 4998
    assert sum(1 for s in corpus if s.label == 1) == 2147
    assert sum(1 for s in corpus if s.label == 0) == 2851


def test_campaign_count_is_rounded_fraction():
    corpus = generate_synthetic(_cfg(total_sessions=10, campaign_fraction=0.25))
    assert sum(1 for s in corpus if s.label == 1) == round(10 * 0.25)


def test_all_normal_and_all_campaign_extremes():
    assert all(s.label == 0 for s in generate_synthetic(_cfg(campaign_fraction=0.0)))
    assert all(s.label == 1 for s in generate_synthetic(_cfg(campaign_fraction=1.0)))


def test_every_session_is_valid_labeled_and_unique(small_corpus):
    urls = set()
    for s in small_corpus:
        validate_session(s)
        assert s.label in (0, 1)
        assert s.url not in urls
        urls.add(s.url)


def test_answer_times_strictly_increase_in_generation_order(small_corpus):
    times = [s.answer_time for s in small_corpus]
    assert all(b > a for a, b in zip(times, times[1:]))


def test_ask_time_never_after_answer_time(small_corpus):
    assert all(s.ask_time <= s.answer_time for s in small_corpus)


def test_posters_dominate_campaign_answers(small_corpus):
    """Campaign answers come from the paid-poster pool ~90% of the time."""
    campaign = [s for s in small_corpus if s.label == 1]
    posters = {f"user{k:04d}" for k in range(80)}
    share = sum(1 for s in campaign if s.answerer_id in posters) / len(campaign)
    assert 0.8 <= share <= 1.0


def test_regulars_dominate_normal_answers(small_corpus):
    normal = [s for s in small_corpus if s.label == 0]
    posters = {f"user{k:04d}" for k in range(80)}
    share = sum(1 for s in normal if s.answerer_id in posters) / len(normal)
    assert share <= 0.05


def test_both_classes_contain_cjk_text(small_corpus):
    def has_cjk(s):
        return any("一" <= ch <= "鿿"
                   for ch in s.title + s.question_text + s.answer_text)
    assert any(has_cjk(s) for s in small_corpus if s.label == 1)
    assert any(has_cjk(s) for s in small_corpus if s.label == 0)


def test_campaign_vocabulary_drifts_between_early_and_late_sessions(standard_corpus):
    """Product eras rotate the promotional vocabulary, so early and late
    campaign sessions should share little of it."""
    campaign = [s for s in standard_corpus if s.label == 1]
    early = campaign[:200]
    late = campaign[-200:]

    def promo_words(sessions):
        words = set()
        for s in sessions:
            words.update(w for w in s.answer_text.split() if w.startswith("promo"))
        return words

    early_words, late_words = promo_words(early), promo_words(late)
    assert early_words and late_words
    overlap = len(early_words & late_words) / len(early_words | late_words)
    assert overlap < 0.2


@pytest.mark.parametrize(
    "overrides",
    [
        dict(total_sessions=0),
        dict(total_sessions=-5),
        dict(campaign_fraction=-0.1),
        dict(campaign_fraction=1.5),
        dict(n_users=0),
        dict(n_paid_posters=0),
        dict(n_paid_posters=1000),  # more posters than users
        dict(campaign_vocab_size=0),
        dict(normal_vocab_size=0),
        dict(template_count=0),
        dict(rng_seed=1.5),
        dict(total_sessions=True),
    ],
)
def test_invalid_config_rejected(overrides):
    with pytest.raises(InvalidConfig):
        generate_synthetic(_cfg(**overrides))
