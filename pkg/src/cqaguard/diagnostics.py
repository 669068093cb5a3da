"""Distribution diagnostics for the rejected per-session features.

Interval post time, like counts, and other-answer counts are extracted per
class, summarized as empirical CDFs, and compared with a two-sample
Kolmogorov-Smirnov statistic. Features whose class distributions overlap
heavily are marked non-separating — the reason they stay out of the model.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import DataContractError
from .sessions import CAMPAIGN, NORMAL, QASession, interval_post_time

# Below this KS statistic the two class distributions are considered
# indistinguishable for classification purposes.
NON_SEPARATING_KS = 0.15


class EmptyInput(DataContractError):
    """A distribution operation received no values."""


@dataclass(frozen=True)
class CdfTable:
    """Empirical CDF: (value, cumulative probability) pairs, values strictly
    increasing, probabilities non-decreasing and ending at 1."""

    points: tuple[tuple[float, float], ...]


def empirical_cdf(values: Sequence[float]) -> CdfTable:
    """Standard empirical CDF over the distinct values."""
    if not values:
        raise EmptyInput("no values")
    n = len(values)
    ordered = sorted(values)
    points: list[tuple[float, float]] = []
    seen = 0
    for i, v in enumerate(ordered):
        seen = i + 1
        if i + 1 == n or ordered[i + 1] != v:
            points.append((float(v), seen / n))
    return CdfTable(points=tuple(points))


def ks_statistic(a: Sequence[float], b: Sequence[float]) -> float:
    """Two-sample Kolmogorov-Smirnov statistic: sup |F_a(x) - F_b(x)|."""
    if not a or not b:
        raise EmptyInput("both samples must be non-empty")
    xs = sorted(a)
    ys = sorted(b)
    na, nb = len(xs), len(ys)
    i = j = 0
    d = 0.0
    while i < na and j < nb:
        x = min(xs[i], ys[j])
        while i < na and xs[i] <= x:
            i += 1
        while j < nb and ys[j] <= x:
            j += 1
        d = max(d, abs(i / na - j / nb))
    return d


REJECTED_FEATURES: dict[str, Callable[[QASession], float]] = {
    "interval_post_time": lambda s: float(interval_post_time(s)),
    "likes": lambda s: float(s.likes),
    "other_answers": lambda s: float(s.other_answers),
}


@dataclass(frozen=True)
class FeatureDiagnostic:
    feature: str
    cdf_normal: CdfTable
    cdf_campaign: CdfTable
    ks: float
    verdict: str  # "non-separating" | "separating"


def diagnostic_report(sessions: Sequence[QASession]) -> list[FeatureDiagnostic]:
    """Per-class CDFs, KS statistic, and verdict for each rejected feature.

    Requires labeled sessions of both classes.
    """
    normal = [s for s in sessions if s.label == NORMAL]
    campaign = [s for s in sessions if s.label == CAMPAIGN]
    if not normal or not campaign:
        raise EmptyInput("diagnostics need labeled sessions of both classes")
    report = []
    for name, extract in REJECTED_FEATURES.items():
        values_n = [extract(s) for s in normal]
        values_c = [extract(s) for s in campaign]
        ks = ks_statistic(values_n, values_c)
        report.append(
            FeatureDiagnostic(
                feature=name,
                cdf_normal=empirical_cdf(values_n),
                cdf_campaign=empirical_cdf(values_c),
                ks=ks,
                verdict="non-separating" if ks < NON_SEPARATING_KS else "separating",
            )
        )
    return report
