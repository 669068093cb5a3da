"""Seeded synthetic Q&A corpus generator.

Stands in for the unavailable real dataset. The generator reproduces the
structure the detector exploits and the drift that makes adaptation matter:

- Campaign sessions are mostly asked and answered by a pool of paid-poster
  accounts whose "careers" are staggered, contiguous windows of the corpus
  timeline — the posters active late in the corpus have no history early on.
- Campaign text is a useful-advice prefix (ordinary vocabulary) followed by
  a product pitch drawn from a product era: a sliding window over the
  campaign vocabulary that rotates as the corpus progresses, with adjacent
  eras overlapping. A model frozen early therefore loses the text signal.
- Engagement statistics (interval to answer, likes, other answers) are drawn
  from the same distributions for both classes, so those features stay
  non-separating, as the diagnostics module verifies.

Identical configs (including rng_seed) produce byte-identical corpora.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import DataContractError
from .sessions import CAMPAIGN, NORMAL, QASession

# Fraction of campaign participant slots filled from the paid-poster pool.
POSTER_SLOT_PROB = 0.9
# A poster's career spans this fraction of the campaign timeline.
CAREER_SPAN_FRACTION = 0.22


class InvalidConfig(DataContractError):
    """SyntheticConfig invariants violated."""


@dataclass(frozen=True)
class SyntheticConfig:
    total_sessions: int
    campaign_fraction: float
    n_users: int = 420
    n_paid_posters: int = 80
    campaign_vocab_size: int = 220
    normal_vocab_size: int = 800
    shared_vocab_size: int = 200
    template_count: int = 11
    rng_seed: int = 7


def standard_config(rng_seed: int = 7) -> SyntheticConfig:
    """The default experiment corpus: 4998 sessions, 2147 of them campaign."""
    return SyntheticConfig(
        total_sessions=4998,
        campaign_fraction=2147 / 4998,
        rng_seed=rng_seed,
    )


def _validate(cfg: SyntheticConfig) -> None:
    counts = {
        "total_sessions": cfg.total_sessions,
        "n_users": cfg.n_users,
        "n_paid_posters": cfg.n_paid_posters,
        "campaign_vocab_size": cfg.campaign_vocab_size,
        "normal_vocab_size": cfg.normal_vocab_size,
        "shared_vocab_size": cfg.shared_vocab_size,
        "template_count": cfg.template_count,
    }
    for name, value in counts.items():
        if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
            raise InvalidConfig(f"{name} must be a positive integer, got {value!r}")
    if not 0.0 <= cfg.campaign_fraction <= 1.0:
        raise InvalidConfig(
            f"campaign_fraction must be in [0,1], got {cfg.campaign_fraction!r}"
        )
    if cfg.n_paid_posters > cfg.n_users:
        raise InvalidConfig("n_paid_posters must not exceed n_users")
    if not isinstance(cfg.rng_seed, int) or isinstance(cfg.rng_seed, bool):
        raise InvalidConfig(f"rng_seed must be an integer, got {cfg.rng_seed!r}")


_TITLES = (
    "best {0} for {1}",
    "how to choose a {0} when {1} matters",
    "need advice about {0} and {1}",
    "which {0} should i get for my {1}",
    "trouble with {0} after {1} help please",
    "is {0} any good compared to {1}",
    "looking for a reliable {0} under {1}",
    "what do you think about {0} for daily {1}",
    "any experience with {0} during {1}",
    "recommend me a {0} that handles {1}",
    "honest opinions on {0} versus {1}",
)

_QUESTIONS = (
    "i have been searching for {0} everywhere and my {1} keeps failing, {2} {3}",
    "my old {0} broke last week so i need {1} advice, mainly about {2} and {3} 怎么办",
    "does anyone actually use {0} with {1}, i care about {2} more than {3}",
    "friends told me {0} is fine but my {1} disagrees, thoughts on {2} {3}",
    "budget is tight and i want {0} that survives {1}, bonus if {2} beats {3}",
    "after reading about {0} i am confused, is {1} worth it for {2} and {3}",
    "please share real stories about {0}, not ads, especially {1} {2} {3}",
    "been comparing {0} and {1} for a month, still unsure about {2} {3} 谢谢",
    "what should i check first in {0}, the {1}, the {2}, or the {3}",
    "is it normal that {0} gets hot when {1} runs, also {2} {3}",
    "my family needs {0} for {1}, durability and {2} matter, plus {3}",
)

_ADVICE_OPENERS = (
    "i had the same problem with {0} last year, what finally worked was checking {1} first",
    "honestly {0} depends on how you handle {1}, start simple",
    "from long experience with {0}, keep an eye on {1} and clean it often",
    "most people overthink {0}, just make sure {1} is set up right",
    "my advice is to test {0} at home and compare {1} carefully",
    "a technician friend says {0} fails mostly from bad {1}",
    "the manual never tells you this but {0} needs {1} every few weeks",
    "it took me months to learn that {0} and {1} must match",
    "do not buy anything before measuring {0} against your {1}",
    "the cheap fix for {0} is usually adjusting {1} yourself",
    "whatever you pick remember {0} lasts longer if {1} stays dry",
)

_PITCHES = (
    "after all that i switched to {pitch} and never looked back, the {0} store ships fast",
    "by the way {pitch} completely solved it for me, search for {0} official shop",
    "my cousin recommended {pitch} and honestly the {0} deal is unbeatable",
    "if you want the easy route just grab {pitch}, their {0} line is amazing",
    "i ended up ordering {pitch} online, the {0} promo made it half price",
    "everyone in my office now uses {pitch}, ask for the {0} bundle",
    "seriously try {pitch}, the {0} edition beats every brand i tested",
    "the only thing that lasted was {pitch}, check the {0} flagship page",
    "skip the rest and order {pitch} today, the {0} coupon still works",
    "for me {pitch} was the answer, their {0} service replies in minutes",
    "trust me on this one {pitch} is worth it, the {0} version especially",
)

_NORMAL_ANSWERS = (
    "in my experience {0} works fine if you respect {1}, i kept mine for years, {2}",
    "tried {0} twice, the trick is {1}, after that {2} stopped being an issue",
    "you can fix {0} yourself, watch a guide about {1} and be patient with {2}",
    "i compared notes with neighbors and {0} holds up when {1} is moderate, {2} 谢谢",
    "honestly any {0} is fine, the real question is {1}, do not ignore {2}",
    "went through this in winter, {0} froze until i insulated {1}, now {2} is fine",
    "borrowed my sister's {0} for a month, {1} surprised me, {2} did not",
    "the repair shop said {0} just needed {1}, cost almost nothing, {2} works 怎么办",
    "keep receipts and test {0} within a week, mine had a {1} defect, {2} saved me",
    "libraries have manuals about {0}, reading about {1} beats guessing at {2}",
    "old models of {0} are simpler, {1} rarely breaks and {2} is replaceable",
)

_CATEGORIES = (
    "electronics", "health", "home", "travel", "finance",
    "education", "sports", "beauty", "food", "auto",
)

_RATINGS = ("resolved", "helpful", "best answer chosen", "")


def _engagement(rng: random.Random) -> tuple[int, int, int]:
    """(interval_seconds, likes, other_answers) — identical law for both
    classes so these features stay non-separating."""
    interval = min(604800, int(rng.lognormvariate(8.2, 1.0)))
    likes = min(80, int(rng.expovariate(0.35)))
    other_answers = min(25, int(rng.expovariate(0.6)))
    return interval, likes, other_answers


def _sample(rng: random.Random, pool: list[str], k: int) -> list[str]:
    return [pool[rng.randrange(len(pool))] for _ in range(k)]


def generate_synthetic(cfg: SyntheticConfig) -> list[QASession]:
    """Generate exactly cfg.total_sessions labeled sessions in close order."""
    _validate(cfg)
    rng = random.Random(cfg.rng_seed)

    n_campaign = round(cfg.total_sessions * cfg.campaign_fraction)
    n_normal = cfg.total_sessions - n_campaign

    campaign_vocab = [f"promo{i}" for i in range(cfg.campaign_vocab_size)]
    normal_vocab = [f"topic{i}" for i in range(cfg.normal_vocab_size)]
    shared_vocab = [f"common{i}" for i in range(cfg.shared_vocab_size)]
    ordinary = normal_vocab + shared_vocab

    users = [f"user{i:04d}" for i in range(cfg.n_users)]
    posters = users[: cfg.n_paid_posters]
    regulars = users[cfg.n_paid_posters :] or users

    # Product eras: a sliding window over the campaign vocabulary; adjacent
    # eras share half their words so the text signal drifts, not jumps.
    stride = max(1, cfg.campaign_vocab_size // 10)
    slice_len = min(cfg.campaign_vocab_size, 2 * stride)
    n_eras = 1 + max(0, cfg.campaign_vocab_size - slice_len) // stride
    era_slices = [
        campaign_vocab[e * stride : e * stride + slice_len] for e in range(n_eras)
    ]

    # Staggered poster careers over campaign ordinals.
    career_len = max(1, round(n_campaign * CAREER_SPAN_FRACTION))
    n_posters = len(posters)
    if n_posters > 1 and n_campaign > career_len:
        starts = [
            round(k * (n_campaign - career_len) / (n_posters - 1))
            for k in range(n_posters)
        ]
    else:
        starts = [0] * n_posters

    def active_posters(ordinal: int) -> list[str]:
        active = [
            posters[k]
            for k in range(n_posters)
            if starts[k] <= ordinal < starts[k] + career_len
        ]
        return active or posters

    def campaign_participant(ordinal: int) -> str:
        if rng.random() < POSTER_SLOT_PROB:
            pool = active_posters(ordinal)
            return pool[rng.randrange(len(pool))]
        return regulars[rng.randrange(len(regulars))]

    labels = [CAMPAIGN] * n_campaign + [NORMAL] * n_normal
    rng.shuffle(labels)

    sessions: list[QASession] = []
    answer_time = 1_600_000_000
    campaign_ordinal = 0
    for idx, label in enumerate(labels):
        answer_time += 1 + int(rng.expovariate(1 / 180))
        interval, likes, other_answers = _engagement(rng)
        template = rng.randrange(cfg.template_count)
        title_words = _sample(rng, ordinary, 2)
        question_words = _sample(rng, ordinary, 4)
        title = _TITLES[template % len(_TITLES)].format(*title_words)
        question = _QUESTIONS[template % len(_QUESTIONS)].format(*question_words)

        if label == CAMPAIGN:
            era = min(n_eras - 1, campaign_ordinal * n_eras // max(1, n_campaign))
            era_words = era_slices[era]
            advice = _ADVICE_OPENERS[template % len(_ADVICE_OPENERS)].format(
                *_sample(rng, ordinary, 2)
            )
            extra_advice = " ".join(_sample(rng, ordinary, 6 + rng.randrange(6)))
            pitch_words = _sample(rng, era_words, 10 + rng.randrange(8))
            pitch = _PITCHES[template % len(_PITCHES)].format(
                pitch_words[0], pitch=" ".join(pitch_words[1:])
            )
            answer = f"{advice} {extra_advice}. {pitch}"
            questioner = campaign_participant(campaign_ordinal)
            answerer = campaign_participant(campaign_ordinal)
            campaign_ordinal += 1
        else:
            body = " ".join(_sample(rng, ordinary, 14 + rng.randrange(14)))
            answer_tmpl = _NORMAL_ANSWERS[template % len(_NORMAL_ANSWERS)]
            answer = answer_tmpl.format(*_sample(rng, ordinary, 3)) + " " + body
            questioner = regulars[rng.randrange(len(regulars))]
            answerer = regulars[rng.randrange(len(regulars))]

        sessions.append(
            QASession(
                url=f"https://qa.example.com/q/{idx:06d}",
                title=title,
                question_text=question,
                answer_text=answer,
                questioner_id=questioner,
                answerer_id=answerer,
                ask_time=answer_time - interval,
                answer_time=answer_time,
                likes=likes,
                other_answers=other_answers,
                category=_CATEGORIES[rng.randrange(len(_CATEGORIES))],
                rating=_RATINGS[rng.randrange(len(_RATINGS))] or None,
                label=label,
            )
        )
    return sessions
