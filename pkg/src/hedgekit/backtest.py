"""Daily event loop: sentiment -> hedge decision -> portfolio P&L.

Timing convention: the decision for day ``t`` is taken at the close of ``t``
from observations dated ``<= t`` and earns the return from ``t`` to ``t+1``.
The first window day establishes the initial hedge at no cost, so equity
starts at exactly 0.  The last window day books the final return and may
still rebalance (its cost is charged) even though no later return follows.
"""
from __future__ import annotations

import csv
import json
import logging
import random
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kernels
from .errors import InsufficientData, InvalidConfig, MisalignedSeries
from .market import PriceSeries, simple_returns
from .policy import PolicyConfig
from .sentiment import SentimentIndexPoint, SentimentObservation, daily_index

log = logging.getLogger(__name__)

_KIND_CODES = {
    "static": kernels.STATIC,
    "proportional": kernels.PROPORTIONAL,
    "threshold_deviation": kernels.THRESHOLD_DEVIATION,
    "incremental": kernels.INCREMENTAL,
}


@dataclass(frozen=True)
class BacktestConfig:
    window_days: int = 250
    sentiment_window: int = 5
    rebalance_every: int = 1
    cost_rate: float = 0.0005
    notional: float = 10000.0
    rf_annual: float = 0.0
    policy: PolicyConfig = field(default_factory=PolicyConfig)

    def __post_init__(self):
        if self.sentiment_window < 1:
            raise InvalidConfig("sentiment_window must be >= 1")
        if self.window_days < self.sentiment_window:
            raise InvalidConfig("window_days must be >= sentiment_window")
        if self.rebalance_every < 1:
            raise InvalidConfig("rebalance_every must be >= 1")
        if not self.cost_rate >= 0:
            raise InvalidConfig("cost_rate must be >= 0")
        if not self.notional > 0:
            raise InvalidConfig("notional must be > 0")


@dataclass
class BacktestRun:
    config: BacktestConfig
    equity: list            # (day, cumulative_pnl)
    hedge_series: list      # (day, hedge_ratio, pre_clamp_value)
    sentiment_series: list  # SentimentIndexPoint, rolling index per window day
    daily_pnl: list         # (day, pnl) for every day after the first
    start_index: int
    carried_days: int
    warmup_days: int

    @property
    def days(self):
        return [d for d, _ in self.equity]

    @property
    def hedges(self) -> np.ndarray:
        return np.array([h for _, h, _ in self.hedge_series])

    @property
    def pnl(self) -> np.ndarray:
        return np.array([p for _, p in self.daily_pnl])

    def equity_curve(self) -> np.ndarray:
        """Account value: notional plus cumulative P&L."""
        return self.config.notional + np.array([c for _, c in self.equity])

    def to_dict(self) -> dict:
        return {
            "config": asdict(self.config),
            "start_day": self.equity[0][0],
            "end_day": self.equity[-1][0],
            "carried_days": self.carried_days,
            "warmup_days": self.warmup_days,
            "equity": [[d, c] for d, c in self.equity],
            "hedge_series": [[d, h, p] for d, h, p in self.hedge_series],
            "sentiment_series": [[p.day, p.value, p.n_observations] for p in self.sentiment_series],
            "daily_pnl": [[d, p] for d, p in self.daily_pnl],
        }


def _simulate(prices: PriceSeries, observations, config: BacktestConfig, start: int) -> BacktestRun:
    policy = config.policy
    points, _ = daily_index(observations, prices.days, neutral=policy.s_neutral)
    values = np.array([p.value for p in points], dtype=np.float64)
    rolled = kernels.rolling_mean(values, config.sentiment_window)

    window_days = prices.days[start:]
    signal = rolled[start:]
    hedges, pre = kernels.hedge_path(
        signal, _KIND_CODES[policy.kind], policy.h0, policy.alpha, policy.beta,
        policy.s_neutral, policy.dead_band, policy.clamp_lo, policy.clamp_hi,
        config.rebalance_every,
    )
    returns = simple_returns(prices.window(start)) if len(window_days) > 1 else np.empty(0)
    pnl, cum = kernels.pnl_path(hedges, returns, config.notional, config.cost_rate)

    counts = [p.n_observations for p in points]
    w = config.sentiment_window
    sentiment_series = []
    for i, day in enumerate(window_days):
        t = start + i
        lo = max(0, t - w + 1)
        sentiment_series.append(SentimentIndexPoint(day, float(rolled[t]), sum(counts[lo : t + 1])))

    return BacktestRun(
        config=config,
        equity=[(window_days[0], 0.0)] + [(d, float(c)) for d, c in zip(window_days[1:], cum)],
        hedge_series=[(d, float(h), float(p)) for d, h, p in zip(window_days, hedges, pre)],
        sentiment_series=sentiment_series,
        daily_pnl=[(d, float(p)) for d, p in zip(window_days[1:], pnl)],
        start_index=start,
        carried_days=sum(1 for c in counts[start:] if c == 0),
        warmup_days=max(0, min(len(window_days), w - 1 - start)),
    )


def _check_alignment(prices: PriceSeries, observations):
    known = set(prices.days)
    stray = sorted({o.day for o in observations if o.day not in known})
    if stray:
        preview = ", ".join(str(d) for d in stray[:5])
        raise MisalignedSeries(f"{len(stray)} observation day(s) have no price: {preview}")


def run(prices: PriceSeries, observations: Sequence[SentimentObservation], config: BacktestConfig) -> BacktestRun:
    """Backtest one policy over the most recent ``window_days`` of ``prices``.

    Raises:
        InsufficientData: fewer than two prices.
        MisalignedSeries: an observation falls on a day without a price.
    """
    n = len(prices)
    if n < 2:
        raise InsufficientData(f"need at least 2 price days, got {n}")
    _check_alignment(prices, observations)
    horizon = config.window_days
    if n < horizon + 1:
        log.warning("price series has %d days, fewer than window_days + 1 = %d; running on all of it",
                    n, horizon + 1)
        horizon = n - 1
    return _simulate(prices, observations, config, start=n - 1 - horizon)


def no_lookahead_audit(
    run_result: BacktestRun,
    prices: PriceSeries,
    observations: Sequence[SentimentObservation],
    n_checks: int = 10,
    seed: int = 0,
) -> bool:
    """Replay the run truncated at random days and compare hedge decisions.

    For each sampled day ``t`` every price and observation dated after ``t``
    is dropped and the run is replayed from the same start day.  The audit
    fails if any decision up to ``t`` differs from the full run.
    """
    start = run_result.start_index
    window = list(range(start, len(prices)))
    rng = random.Random(seed)
    picks = sorted(rng.sample(window, min(n_checks, len(window))))
    full = run_result.hedge_series
    for idx in picks:
        cutoff = prices.days[idx]
        visible = [o for o in observations if o.day <= cutoff]
        truncated = prices.window(0, idx + 1)
        replay = _simulate(truncated, visible, run_result.config, start)
        for a, b in zip(full[: idx - start + 1], replay.hedge_series):
            if a[:2] != b[:2]:
                return False
    return True


# -- artifacts -------------------------------------------------------------

def write_artifacts(run_result: BacktestRun, out_dir, report=None) -> None:
    """Write ``run.json``, ``equity.csv`` and ``hedges.csv`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = run_result.to_dict()
    if report is not None:
        payload["report"] = report.to_dict()
    with open(out / "run.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, allow_nan=False)
        fh.write("\n")
    with open(out / "equity.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["day", "cumulative_pnl", "equity"])
        for day, cum in run_result.equity:
            writer.writerow([day, repr(cum), repr(run_result.config.notional + cum)])
    with open(out / "hedges.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["day", "hedge_ratio", "pre_clamp", "sentiment"])
        for (day, h, p), s in zip(run_result.hedge_series, run_result.sentiment_series):
            writer.writerow([day, repr(h), repr(p), repr(s.value)])
