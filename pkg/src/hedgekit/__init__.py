"""Backtesting toolkit for sentiment-driven dynamic hedging."""
from .backtest import BacktestConfig, BacktestRun, no_lookahead_audit, run
from .kernels import BACKEND
from .market import PriceSeries, SyntheticConfig, generate_synthetic, load_csv, simple_returns, write_csv
from .metrics import PerformanceReport, evaluate
from .policy import (
    PolicyConfig, PortfolioState, hedge_incremental, hedge_proportional, hedge_static,
    hedge_threshold_deviation, portfolio_update,
)
from .sentiment import (
    SentimentIndexPoint, SentimentObservation, SourceWeights, action_gate, aggregate_mean,
    aggregate_weighted, rolling_index,
)

__version__ = "0.1.0"
