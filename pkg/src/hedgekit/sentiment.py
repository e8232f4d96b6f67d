"""Sentiment observations and their aggregation into a daily market index."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .errors import EmptyInput, InvalidConfig, ParseError, UnsortedInput, ZeroWeightSum

SOURCES = ("news", "social", "financial_report", "survey", "other")

# Per-source reliability weights; the observation counts reported for each
# source are used as defaults.  "other" has no reported count.
DEFAULT_SOURCE_WEIGHTS = {
    "news": 150.0,
    "social": 200.0,
    "financial_report": 120.0,
    "survey": 90.0,
    "other": 1.0,
}

NEUTRAL = 0.5


@dataclass(frozen=True)
class SentimentObservation:
    score: float
    weight: float
    source: str
    day: int

    def __post_init__(self):
        if not (0.0 <= self.score <= 1.0):
            raise ValueError(f"score must lie in [0, 1], got {self.score!r}")
        if not (self.weight >= 0.0) or math.isinf(self.weight):
            raise ValueError(f"weight must be finite and non-negative, got {self.weight!r}")
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}; expected one of {SOURCES}")
        if self.day < 0:
            raise ValueError(f"day must be >= 0, got {self.day}")


@dataclass(frozen=True)
class SentimentIndexPoint:
    """Aggregated sentiment for one trading day.

    ``n_observations`` counts the texts behind the value.  It is 0 for a day
    that had no observations and carries an earlier value forward.
    """

    day: int
    value: float
    n_observations: int


class SourceWeights(dict):
    """Mapping of source label to reliability weight."""

    def __init__(self, weights: Mapping[str, float] | None = None):
        merged = dict(DEFAULT_SOURCE_WEIGHTS)
        if weights:
            for key, value in weights.items():
                if key not in SOURCES:
                    raise InvalidConfig(f"unknown sentiment source {key!r}")
                merged[key] = float(value)
        if any(w < 0 for w in merged.values()):
            raise InvalidConfig("source weights must be non-negative")
        if not any(w > 0 for w in merged.values()):
            raise InvalidConfig("at least one source weight must be positive")
        super().__init__(merged)


def _check_same_day(observations):
    days = {obs.day for obs in observations}
    if len(days) > 1:
        raise ValueError(f"observations span several days: {sorted(days)}")
    return observations[0].day


def aggregate_weighted(observations: Sequence[SentimentObservation]) -> SentimentIndexPoint:
    """Reliability-weighted mean score of one day's observations."""
    if not observations:
        raise EmptyInput("no observations to aggregate")
    day = _check_same_day(observations)
    num = 0.0
    den = 0.0
    for obs in observations:
        num += obs.weight * obs.score
        den += obs.weight
    if den <= 0.0:
        raise ZeroWeightSum(f"all observation weights are zero on day {day}")
    value = num / den
    # rounding can push the ratio a ulp outside the score range
    lo = min(o.score for o in observations)
    hi = max(o.score for o in observations)
    value = min(max(value, lo), hi)
    return SentimentIndexPoint(day=day, value=value, n_observations=len(observations))


def aggregate_mean(observations: Sequence[SentimentObservation]) -> SentimentIndexPoint:
    if not observations:
        raise EmptyInput("no observations to aggregate")
    day = _check_same_day(observations)
    total = 0.0
    for obs in observations:
        total += obs.score
    value = total / len(observations)
    lo = min(o.score for o in observations)
    hi = max(o.score for o in observations)
    value = min(max(value, lo), hi)
    return SentimentIndexPoint(day=day, value=value, n_observations=len(observations))


def rolling_index(daily_points: Sequence[SentimentIndexPoint], window: int) -> list[SentimentIndexPoint]:
    """Trailing ``window``-day mean of daily index values.

    The first ``window - 1`` days average over however many days exist so
    far, so the output has the same length as the input.
    """
    if window < 1:
        raise InvalidConfig(f"window must be >= 1, got {window}")
    if not daily_points:
        raise EmptyInput("no index points")
    for prev, cur in zip(daily_points, daily_points[1:]):
        if cur.day <= prev.day:
            raise UnsortedInput(f"index days must be strictly increasing ({prev.day} then {cur.day})")
    values = np.array([p.value for p in daily_points], dtype=np.float64)
    means = kernels.rolling_mean(values, window)
    counts = [p.n_observations for p in daily_points]
    out = []
    for t, point in enumerate(daily_points):
        start = max(0, t - window + 1)
        out.append(SentimentIndexPoint(point.day, float(means[t]), sum(counts[start : t + 1])))
    return out


def action_gate(index: SentimentIndexPoint, config) -> bool:
    """True when the index is far enough from neutral to justify acting."""
    return abs(index.value - config.s_neutral) >= config.dead_band


def daily_index(
    observations: Iterable[SentimentObservation],
    days: Sequence[int],
    neutral: float = NEUTRAL,
) -> tuple[list[SentimentIndexPoint], int]:
    """One weighted index point per entry of ``days``.

    Days without observations repeat the previous value (``neutral`` before
    the first observed day).  Returns the points and the number of such
    carried days.
    """
    by_day: dict[int, list[SentimentObservation]] = {}
    for obs in observations:
        by_day.setdefault(obs.day, []).append(obs)
    points = []
    carried = 0
    last = neutral
    for day in days:
        group = by_day.get(day)
        if group:
            point = aggregate_weighted(group)
            last = point.value
        else:
            point = SentimentIndexPoint(day, last, 0)
            carried += 1
        points.append(point)
    return points, carried


# -- CSV I/O -------------------------------------------------------------

OBSERVATION_HEADER = ["day", "source", "score", "weight"]


def load_observations(path, weights: Mapping[str, float] | None = None) -> list[SentimentObservation]:
    """Read ``day,source,score,weight``; an empty or missing weight uses the source default."""
    weights = SourceWeights(weights) if not isinstance(weights, SourceWeights) else weights
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError("empty file", line=1)
        header = [h.strip() for h in header]
        if header not in (OBSERVATION_HEADER, OBSERVATION_HEADER[:3]):
            raise ParseError(f"expected header {','.join(OBSERVATION_HEADER)}, got {','.join(header)}", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) not in (3, 4):
                raise ParseError(f"expected 3 or 4 fields, got {len(row)}", line=lineno)
            try:
                day = int(row[0])
                source = row[1].strip()
                score = float(row[2])
                weight = float(row[3]) if len(row) == 4 and row[3].strip() else weights[source]
                out.append(SentimentObservation(score=score, weight=weight, source=source, day=day))
            except (ValueError, KeyError) as exc:
                raise ParseError(str(exc), line=lineno) from None
    return out


def write_observations(path, observations: Iterable[SentimentObservation]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(OBSERVATION_HEADER)
        for obs in observations:
            writer.writerow([obs.day, obs.source, repr(float(obs.score)), repr(float(obs.weight))])
