"""Performance metrics for a backtest run.

Conventions, also written into every report's ``conventions`` block:
daily returns are P&L divided by the fixed notional, Sharpe uses the sample
(n-1) standard deviation and sqrt(252) annualization, drawdown is measured on
``notional + cumulative P&L``, and "risk exposure" is the mean unhedged
fraction ``1 - H`` over the days that carried market risk.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

from . import kernels
from .errors import EmptyInput, NonPositiveEquity, TooShort, ZeroVolatility

TRADING_DAYS = 252

CONVENTIONS = {
    "periods_per_year": TRADING_DAYS,
    "stdev": "sample (n-1)",
    "sharpe": "mean(excess daily return) / stdev * sqrt(252)",
    "drawdown_base": "notional + cumulative_pnl",
    "win": "day with pnl > 0",
    "risk_exposure": "mean(1 - hedge_ratio) over return-bearing days",
    "ann_return": "(final/initial)^(252/n) - 1",
}


@dataclass(frozen=True)
class PerformanceReport:
    sharpe: float | None   # None when the P&L has zero variance
    max_drawdown: float
    win_rate: float
    avg_profit: float
    risk_exposure: float
    annualized_return: float
    annualized_vol: float
    n_days: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["conventions"] = CONVENTIONS
        return d


def _sample_std(xs, mean):
    n = len(xs)
    acc = 0.0
    for x in xs:
        acc += (x - mean) ** 2
    return math.sqrt(acc / (n - 1))


def sharpe(daily_pnl: Sequence[float], notional: float, rf_annual: float = 0.0) -> float:
    if len(daily_pnl) < 2:
        raise TooShort("Sharpe needs at least two observations")
    rf_daily = rf_annual / TRADING_DAYS
    excess = [p / notional - rf_daily for p in daily_pnl]
    mean = math.fsum(excess) / len(excess)
    sd = _sample_std(excess, mean)
    # relative test: a constant series leaves only rounding noise in sd
    if sd <= 1e-14 * max(1.0, abs(mean)):
        raise ZeroVolatility("P&L series has zero variance")
    return mean / sd * math.sqrt(TRADING_DAYS)


def max_drawdown(equity: Sequence[float]) -> float:
    """Largest peak-to-trough decline as a fraction of the peak."""
    if len(equity) == 0:
        raise EmptyInput("empty equity curve")
    for v in equity:
        if not v > 0:
            raise NonPositiveEquity(f"equity must stay positive, got {v}")
    return float(kernels.max_drawdown(list(map(float, equity))))


def win_rate(daily_pnl: Sequence[float]) -> float:
    if len(daily_pnl) == 0:
        raise EmptyInput("no P&L days")
    return sum(1 for p in daily_pnl if p > 0) / len(daily_pnl)


def avg_profit(daily_pnl: Sequence[float]) -> float:
    if len(daily_pnl) == 0:
        raise EmptyInput("no P&L days")
    return math.fsum(daily_pnl) / len(daily_pnl)


def risk_exposure(hedge_ratios: Sequence[float]) -> float:
    if len(hedge_ratios) == 0:
        raise EmptyInput("no hedge ratios")
    return math.fsum(1.0 - h for h in hedge_ratios) / len(hedge_ratios)


def annualized_return(equity: Sequence[float], notional: float | None = None) -> float:
    """Geometric annualization of the equity curve over ``len(equity) - 1`` days.

    ``equity`` is account value.  When ``notional`` is given, ``equity`` is
    read as cumulative P&L and shifted by it.
    """
    if len(equity) < 2:
        return 0.0
    start, end = float(equity[0]), float(equity[-1])
    if notional is not None:
        start, end = start + notional, end + notional
    if not (start > 0 and end > 0):
        raise NonPositiveEquity("equity must stay positive")
    n = len(equity) - 1
    return (end / start) ** (TRADING_DAYS / n) - 1.0


def annualized_vol(daily_pnl: Sequence[float], notional: float) -> float:
    if len(daily_pnl) < 2:
        return 0.0
    xs = [p / notional for p in daily_pnl]
    mean = math.fsum(xs) / len(xs)
    return _sample_std(xs, mean) * math.sqrt(TRADING_DAYS)


def evaluate(run) -> PerformanceReport:
    """All report metrics for a :class:`~hedgekit.backtest.BacktestRun`."""
    cfg = run.config
    pnl = [p for _, p in run.daily_pnl]
    equity = [cfg.notional + c for _, c in run.equity]
    try:
        sr = sharpe(pnl, cfg.notional, cfg.rf_annual)
    except (ZeroVolatility, TooShort):
        sr = None
    # the last decision earns no return within the window
    bearing = [h for _, h, _ in run.hedge_series[:-1]] or [run.hedge_series[0][1]]
    return PerformanceReport(
        sharpe=sr,
        max_drawdown=max_drawdown(equity),
        win_rate=win_rate(pnl) if pnl else 0.0,
        avg_profit=avg_profit(pnl) if pnl else 0.0,
        risk_exposure=risk_exposure(bearing),
        annualized_return=annualized_return(equity),
        annualized_vol=annualized_vol(pnl, cfg.notional),
        n_days=len(pnl),
    )
