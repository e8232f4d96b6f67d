"""Run configuration files (YAML).

Example::

    market:
      synthetic: {n_days: 504, mu: 0.05, sigma: 0.2, kappa: 0.02, phi: 0.9, sigma_s: 0.05, seed: 42}
      # or: csv: prices.csv
    sentiment:
      # csv: sentiment.csv        (day,source,score,weight)
      # texts: texts.csv          (day,source,text), scored by the provider
      sentiment_window: 5
      dead_band: 0.0
      weights: {news: 150, social: 200, financial_report: 120, survey: 90}
      provider: {kind: lexicon, endpoint: null, timeout_ms: 5000, retries: 2, fallback: true}
    policy: {kind: threshold_deviation, h0: 0.65, alpha: -0.4, beta: -0.5,
             s_neutral: 0.5, dead_band: 0.0, clamp: [0.0, 1.0]}
    backtest: {window_days: 250, rebalance_every: 1, cost_rate: 0.0005, notional: 10000}
    trials: {n_seeds: 100, base_seed: 42}
    sweep: {beta: [-1.0, -0.5, 0.0], dead_band: [0.0, 0.05]}

Unknown keys anywhere are an error.  Relative paths resolve against the
directory holding the config file.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import yaml

from .backtest import BacktestConfig
from .errors import InvalidConfig
from .market import SyntheticConfig
from .policy import PolicyConfig
from .providers import ProviderConfig
from .sentiment import SourceWeights

SECTIONS = ("market", "sentiment", "policy", "backtest", "trials", "sweep")
SWEEP_KEYS = ("alpha", "beta", "s_neutral", "dead_band")


@dataclass(frozen=True)
class RunConfig:
    backtest: BacktestConfig = field(default_factory=BacktestConfig)
    synthetic: SyntheticConfig | None = field(default_factory=SyntheticConfig)
    market_csv: str | None = None
    sentiment_csv: str | None = None
    texts: str | None = None
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    weights: dict = field(default_factory=lambda: dict(SourceWeights()))
    n_seeds: int = 1
    base_seed: int | None = None
    sweep: dict = field(default_factory=dict)

    @property
    def policy(self) -> PolicyConfig:
        return self.backtest.policy

    def seeds(self) -> list[int]:
        base = self.base_seed if self.base_seed is not None else (self.synthetic.seed if self.synthetic else 0)
        return [base + i for i in range(self.n_seeds)] if self.synthetic else [base]

    def with_seed(self, seed: int) -> "RunConfig":
        synth = replace(self.synthetic, seed=seed) if self.synthetic else None
        return replace(self, synthetic=synth, base_seed=seed)


def _check_keys(section: str, data, allowed) -> dict:
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise InvalidConfig(f"[{section}] must be a mapping")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise InvalidConfig(f"unknown key(s) in {section}: {', '.join(map(str, unknown))}")
    return data


def _field_names(cls):
    return [f.name for f in fields(cls)]


def _build(cls, section, data, **extra):
    try:
        return cls(**data, **extra)
    except TypeError as exc:
        raise InvalidConfig(f"{section}: {exc}") from None
    except ValueError as exc:
        raise InvalidConfig(f"{section}: {exc}") from None


def _resolve(path, base: Path | None):
    if path is None:
        return None
    p = Path(path)
    if base is not None and not p.is_absolute():
        p = base / p
    return str(p)


def parse_config(data: dict, base_dir=None) -> RunConfig:
    base = Path(base_dir) if base_dir is not None else None
    data = _check_keys("config", data or {}, SECTIONS)

    market = _check_keys("market", data.get("market"), ("csv", "synthetic"))
    if "csv" in market and "synthetic" in market:
        raise InvalidConfig("market: give either csv or synthetic, not both")
    synthetic = None
    if "csv" not in market:
        synth = _check_keys("market.synthetic", market.get("synthetic"), _field_names(SyntheticConfig))
        synthetic = _build(SyntheticConfig, "market.synthetic", synth)

    sent = _check_keys("sentiment", data.get("sentiment"),
                       ("csv", "texts", "sentiment_window", "dead_band", "weights", "provider"))
    if "csv" in sent and "texts" in sent:
        raise InvalidConfig("sentiment: give either csv or texts, not both")
    prov = _check_keys("sentiment.provider", sent.get("provider"), _field_names(ProviderConfig))
    prov = dict(prov)
    if prov.get("lexicon"):
        prov["lexicon"] = _resolve(prov["lexicon"], base)
    if prov.get("cache"):
        prov["cache"] = _resolve(prov["cache"], base)
    provider = _build(ProviderConfig, "sentiment.provider", prov)
    weights = dict(SourceWeights(sent.get("weights")))

    pol = dict(_check_keys("policy", data.get("policy"),
                           ("kind", "h0", "alpha", "beta", "s_neutral", "dead_band", "clamp")))
    if "clamp" in pol:
        clamp = pol.pop("clamp")
        if not (isinstance(clamp, (list, tuple)) and len(clamp) == 2):
            raise InvalidConfig("policy.clamp must be [lo, hi]")
        pol["clamp_lo"], pol["clamp_hi"] = float(clamp[0]), float(clamp[1])
    if "dead_band" in sent:
        if "dead_band" in pol and pol["dead_band"] != sent["dead_band"]:
            raise InvalidConfig("sentiment.dead_band and policy.dead_band disagree")
        pol["dead_band"] = sent["dead_band"]
    policy = _build(PolicyConfig, "policy", pol)

    bt = dict(_check_keys("backtest", data.get("backtest"),
                          [n for n in _field_names(BacktestConfig) if n != "policy"]))
    if "sentiment_window" in sent:
        if "sentiment_window" in bt and bt["sentiment_window"] != sent["sentiment_window"]:
            raise InvalidConfig("sentiment.sentiment_window and backtest.sentiment_window disagree")
        bt["sentiment_window"] = sent["sentiment_window"]
    backtest = _build(BacktestConfig, "backtest", bt, policy=policy)

    trials = _check_keys("trials", data.get("trials"), ("n_seeds", "base_seed"))
    n_seeds = trials.get("n_seeds", 1)
    if not isinstance(n_seeds, int) or n_seeds < 1:
        raise InvalidConfig("trials.n_seeds must be a positive integer")
    base_seed = trials.get("base_seed")
    if base_seed is not None and (not isinstance(base_seed, int) or base_seed < 0):
        raise InvalidConfig("trials.base_seed must be a non-negative integer")

    sweep = _check_keys("sweep", data.get("sweep"), SWEEP_KEYS)
    for key, values in sweep.items():
        if not isinstance(values, list) or not values:
            raise InvalidConfig(f"sweep.{key} must be a non-empty list")

    return RunConfig(
        backtest=backtest,
        synthetic=synthetic,
        market_csv=_resolve(market.get("csv"), base),
        sentiment_csv=_resolve(sent.get("csv"), base),
        texts=_resolve(sent.get("texts"), base),
        provider=provider,
        weights=weights,
        n_seeds=n_seeds,
        base_seed=base_seed,
        sweep={k: [float(v) for v in vals] for k, vals in sweep.items()},
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidConfig(f"cannot read config {path}: {exc}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise InvalidConfig(f"{path}: {exc}") from None
    return parse_config(data, base_dir=path.parent)


def to_dict(cfg: RunConfig) -> dict:
    """Inverse of :func:`parse_config` (paths are written as resolved)."""
    pol = asdict(cfg.policy)
    lo, hi = pol.pop("clamp_lo"), pol.pop("clamp_hi")
    pol["clamp"] = [lo, hi]
    bt = asdict(cfg.backtest)
    del bt["policy"]
    market = {"csv": cfg.market_csv} if cfg.market_csv else {"synthetic": asdict(cfg.synthetic)}
    sentiment = {"weights": dict(cfg.weights), "provider": asdict(cfg.provider)}
    if cfg.sentiment_csv:
        sentiment["csv"] = cfg.sentiment_csv
    if cfg.texts:
        sentiment["texts"] = cfg.texts
    trials = {"n_seeds": cfg.n_seeds}
    if cfg.base_seed is not None:
        trials["base_seed"] = cfg.base_seed
    out = {"market": market, "sentiment": sentiment, "policy": pol, "backtest": bt, "trials": trials}
    if cfg.sweep:
        out["sweep"] = {k: list(v) for k, v in cfg.sweep.items()}
    return out


def dump_config(cfg: RunConfig) -> str:
    return yaml.safe_dump(to_dict(cfg), sort_keys=False)
