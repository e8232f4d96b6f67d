"""Hedge ratio update laws and portfolio accounting.

A hedge ratio ``H`` is the fraction of one unit of long exposure that is
offset by a short hedge; ``1 - H`` of the notional earns the underlying's
return.  Four policy kinds are available:

static
    ``H = h0`` every day.
proportional
    ``H = clamp(h0 + alpha * S)``, a level in the sentiment index.
threshold_deviation
    ``H = clamp(h0 + beta * (S - s_neutral))``.
incremental
    ``H_t = clamp(H_prev + alpha * (S_t - S_prev))`` where ``S_prev`` is the
    index at the last applied update.

Sensitivities are signed.  The defaults (``alpha=-0.4``, ``beta=-0.5``) add
protection when sentiment turns bearish.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import InvalidConfig

POLICY_KINDS = ("static", "proportional", "threshold_deviation", "incremental")


@dataclass(frozen=True)
class PolicyConfig:
    kind: str = "threshold_deviation"
    h0: float = 0.65
    alpha: float = -0.4
    beta: float = -0.5
    s_neutral: float = 0.5
    dead_band: float = 0.0
    clamp_lo: float = 0.0
    clamp_hi: float = 1.0

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise InvalidConfig(f"policy kind must be one of {POLICY_KINDS}, got {self.kind!r}")
        if not self.clamp_lo < self.clamp_hi:
            raise InvalidConfig(f"clamp bounds must satisfy lo < hi, got [{self.clamp_lo}, {self.clamp_hi}]")
        if not self.clamp_lo <= self.h0 <= self.clamp_hi:
            raise InvalidConfig(f"h0={self.h0} lies outside the clamp bounds")
        if not 0.0 <= self.s_neutral <= 1.0:
            raise InvalidConfig(f"s_neutral must lie in [0, 1], got {self.s_neutral}")
        if not self.dead_band >= 0.0:
            raise InvalidConfig(f"dead_band must be >= 0, got {self.dead_band}")

    def with_kind(self, kind: str) -> "PolicyConfig":
        return replace(self, kind=kind)

    def clamp(self, value: float) -> float:
        if value < self.clamp_lo:
            return self.clamp_lo
        if value > self.clamp_hi:
            return self.clamp_hi
        return value


@dataclass(frozen=True)
class PortfolioState:
    day: int
    hedge_ratio: float
    position_value: float
    cumulative_pnl: float = 0.0
    daily_pnl: float = 0.0


def hedge_static(config: PolicyConfig) -> float:
    return config.h0


def hedge_proportional(s_total: float, config: PolicyConfig) -> float:
    return config.clamp(config.h0 + config.alpha * s_total)


def hedge_threshold_deviation(s: float, config: PolicyConfig) -> float:
    return config.clamp(config.h0 + config.beta * (s - config.s_neutral))


def hedge_incremental(prev_h: float, delta_s: float, config: PolicyConfig, gate_open: bool = True) -> float:
    """One step of the incremental law; a closed gate keeps ``prev_h``."""
    if not gate_open:
        return prev_h
    return config.clamp(prev_h + config.alpha * delta_s)


def portfolio_update(
    state: PortfolioState,
    new_h: float,
    day_return: float,
    cost_rate: float,
    notional: float | None = None,
) -> PortfolioState:
    """Book one day: earn ``day_return`` on the unhedged part, then rebalance.

    The return accrues on ``state.hedge_ratio`` (the ratio held over the
    period); the proportional cost is charged on the traded change of ratio.
    ``notional`` defaults to ``state.position_value``.
    """
    if cost_rate < 0:
        raise ValueError("cost_rate must be non-negative")
    notional = state.position_value if notional is None else notional
    h_prev = state.hedge_ratio
    pnl = notional * (1.0 - h_prev) * day_return - notional * cost_rate * abs(new_h - h_prev)
    return PortfolioState(
        day=state.day + 1,
        hedge_ratio=new_h,
        position_value=state.position_value,
        cumulative_pnl=state.cumulative_pnl + pnl,
        daily_pnl=pnl,
    )
