"""Price series: CSV ingestion and a seeded, sentiment-coupled generator.

Generator recurrences, with ``S_0 = 0.5`` and ``p_0 = 100``::

    r[t+1] = mu/252 + kappa * (S[t] - 0.5) + sigma/sqrt(252) * eps[t]
    p[t+1] = p[t] * (1 + r[t+1])
    S[t+1] = clip(0.5 + phi * (S[t] - 0.5) + sigma_s * eta[t], 0, 1)

Sentiment at day ``t`` moves the return from ``t`` to ``t+1``, so a policy
that reads only information dated up to ``t`` still has an edge when
``kappa != 0``.  ``eps[t]`` and ``eta[t]`` are the two halves of the
``t``-th Box-Muller pair drawn from xoshiro256** (seeded via splitmix64).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidConfig, NonMonotoneDays, NonPositivePrice, ParseError, TooShort
from .sentiment import SentimentIndexPoint, SentimentObservation

TRADING_DAYS = 252


@dataclass(frozen=True)
class PriceSeries:
    days: tuple
    prices: tuple

    def __post_init__(self):
        if len(self.days) != len(self.prices):
            raise ValueError("days and prices differ in length")
        for a, b in zip(self.days, self.days[1:]):
            if b <= a:
                raise ValueError(f"days must be strictly increasing ({a} then {b})")
        for p in self.prices:
            if not p > 0:
                raise ValueError(f"prices must be positive, got {p}")

    def __len__(self):
        return len(self.prices)

    def window(self, start: int, stop: int | None = None) -> "PriceSeries":
        return PriceSeries(self.days[start:stop], self.prices[start:stop])


@dataclass(frozen=True)
class SyntheticConfig:
    n_days: int = 504
    mu: float = 0.05
    sigma: float = 0.20
    kappa: float = 0.02
    phi: float = 0.9
    sigma_s: float = 0.05
    seed: int = 42

    def __post_init__(self):
        if int(self.n_days) != self.n_days or self.n_days < 2:
            raise InvalidConfig(f"n_days must be an integer >= 2, got {self.n_days}")
        if not self.sigma > 0:
            raise InvalidConfig(f"sigma must be > 0, got {self.sigma}")
        if not 0 <= self.phi < 1:
            raise InvalidConfig(f"phi must lie in [0, 1), got {self.phi}")
        if not self.sigma_s >= 0:
            raise InvalidConfig(f"sigma_s must be >= 0, got {self.sigma_s}")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidConfig("seed must be an unsigned 64-bit integer")
        for name in ("mu", "kappa"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidConfig(f"{name} must be finite")


def simple_returns(series: PriceSeries) -> np.ndarray:
    if len(series) < 2:
        raise TooShort("need at least two prices to form a return")
    p = np.asarray(series.prices, dtype=np.float64)
    return p[1:] / p[:-1] - 1.0


def generate_synthetic(config: SyntheticConfig) -> tuple[PriceSeries, list[SentimentIndexPoint]]:
    prices, sent = kernels.synth_path(
        int(config.seed), int(config.n_days), config.mu, config.sigma,
        config.kappa, config.phi, config.sigma_s,
    )
    if not np.all(prices > 0):
        raise InvalidConfig("generated price path hit zero; lower sigma or kappa")
    days = tuple(range(int(config.n_days)))
    series = PriceSeries(days, tuple(float(p) for p in prices))
    index = [SentimentIndexPoint(d, float(s), 1) for d, s in zip(days, sent)]
    return series, index


def synthetic_observations(index) -> list[SentimentObservation]:
    """One unit-weight observation of source ``other`` per index point."""
    return [SentimentObservation(score=p.value, weight=1.0, source="other", day=p.day) for p in index]


def load_csv(path) -> PriceSeries:
    days, prices = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["day", "price"]:
            raise ParseError("expected header day,price", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise ParseError(f"expected 2 fields, got {len(row)}", line=lineno)
            try:
                day = int(row[0])
                price = float(row[1])
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
            if not price > 0 or not math.isfinite(price):
                raise NonPositivePrice(f"price must be positive, got {row[1]}", line=lineno)
            if days and day <= days[-1]:
                raise NonMonotoneDays(f"day {day} does not follow {days[-1]}", line=lineno)
            days.append(day)
            prices.append(price)
    if not prices:
        raise ParseError("no price rows", line=2)
    return PriceSeries(tuple(days), tuple(prices))


def write_csv(path, series: PriceSeries) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["day", "price"])
        for d, p in zip(series.days, series.prices):
            writer.writerow([d, repr(float(p))])
