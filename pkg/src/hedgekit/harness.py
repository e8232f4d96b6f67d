"""Multi-seed, multi-policy experiment runner.

Trials are independent (one seed, one market path each) and may run in
worker processes.  Results are sorted by ``(method, seed)`` before any
reduction, so the output never depends on ``jobs``.
"""
from __future__ import annotations

import csv
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from . import backtest, market
from .errors import InvalidConfig
from .metrics import evaluate
from .policy import POLICY_KINDS
from .providers import Scorer, load_texts, score_texts
from .sentiment import SourceWeights, load_observations

COMPARE_COLUMNS = ["model", "method", "sharpe", "max_drawdown", "win_rate", "avg_profit",
                   "risk_exposure", "ann_return", "ann_vol"]
METRIC_KEYS = {
    "sharpe": "sharpe",
    "max_drawdown": "max_drawdown",
    "win_rate": "win_rate",
    "avg_profit": "avg_profit",
    "risk_exposure": "risk_exposure",
    "ann_return": "annualized_return",
    "ann_vol": "annualized_vol",
}


@dataclass
class MarketData:
    prices: market.PriceSeries
    observations: list
    model: str


def load_market(cfg, seed: int | None = None) -> MarketData:
    """Prices and sentiment observations for one trial."""
    weights = SourceWeights(cfg.weights)
    generated = None
    if cfg.market_csv:
        prices = market.load_csv(cfg.market_csv)
    else:
        synth = cfg.synthetic if seed is None else replace(cfg.synthetic, seed=seed)
        prices, generated = market.generate_synthetic(synth)

    if cfg.sentiment_csv:
        return MarketData(prices, load_observations(cfg.sentiment_csv, weights), "csv")
    if cfg.texts:
        scorer = Scorer(cfg.provider)
        obs = score_texts(load_texts(cfg.texts), scorer, weights)
        return MarketData(prices, obs, cfg.provider.kind)
    if generated is None:
        raise InvalidConfig("a csv market needs sentiment.csv or sentiment.texts")
    return MarketData(prices, market.synthetic_observations(generated), "synthetic")


def _metrics_row(report) -> dict:
    return {col: getattr(report, attr) for col, attr in METRIC_KEYS.items()}


def run_trial(cfg, seed, kinds, policy_overrides=None, data: MarketData | None = None, keep_equity=False):
    """Run each policy kind on one market path.

    Returns a list of dicts with keys ``method, seed, metrics`` (and
    ``equity`` when ``keep_equity``), in the order of ``kinds``.
    """
    if data is None:
        data = load_market(cfg, seed)
    base_policy = replace(cfg.policy, **(policy_overrides or {}))
    out = []
    for kind in kinds:
        bt_cfg = replace(cfg.backtest, policy=base_policy.with_kind(kind))
        result = backtest.run(data.prices, data.observations, bt_cfg)
        rec = {"method": kind, "seed": seed, "model": data.model, "metrics": _metrics_row(evaluate(result))}
        if keep_equity:
            rec["equity"] = [[d, bt_cfg.notional + c] for d, c in result.equity]
        out.append(rec)
    return out


def _dispatch(tasks, jobs):
    """Run ``(fn, args)`` tasks, serially or across ``jobs`` processes."""
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(*args) for fn, args in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(fn, *args) for fn, args in tasks]
        return [f.result() for f in futures]


def _shared_data(cfg):
    # non-synthetic inputs are loaded (and scored) once in the parent
    return None if cfg.synthetic is not None and not cfg.market_csv else load_market(cfg)


def _mean(xs):
    xs = [x for x in xs if x is not None]
    return math.fsum(xs) / len(xs) if xs else None


def _std(xs):
    xs = [x for x in xs if x is not None]
    if len(xs) < 2:
        return 0.0 if xs else None
    m = math.fsum(xs) / len(xs)
    return math.sqrt(math.fsum((x - m) ** 2 for x in xs) / (len(xs) - 1))


def summarize(records, kinds) -> dict:
    by_method = {k: [r for r in records if r["method"] == k] for k in kinds}
    summary = {}
    for kind, recs in by_method.items():
        summary[kind] = {
            "mean": {col: _mean([r["metrics"][col] for r in recs]) for col in METRIC_KEYS},
            "std": {col: _std([r["metrics"][col] for r in recs]) for col in METRIC_KEYS},
            "n_trials": len(recs),
        }
    return summary


def sharpe_win_fractions(records, baseline="static") -> dict:
    """Per method, the fraction of seeds whose Sharpe beats the baseline's."""
    base = {r["seed"]: r["metrics"]["sharpe"] for r in records if r["method"] == baseline}
    wins, totals = {}, {}
    for r in records:
        if r["method"] == baseline:
            continue
        b, s = base.get(r["seed"]), r["metrics"]["sharpe"]
        if b is None or s is None:
            continue
        totals[r["method"]] = totals.get(r["method"], 0) + 1
        wins[r["method"]] = wins.get(r["method"], 0) + (s > b)
    return {m: wins[m] / totals[m] for m in sorted(totals)}


def compare(cfg, jobs: int = 1, kinds=POLICY_KINDS) -> dict:
    """All policy kinds on identical data, for every trial seed."""
    data = _shared_data(cfg)
    seeds = cfg.seeds()
    first = seeds[0]
    tasks = [(run_trial, (cfg, s, kinds, None, data, s == first)) for s in seeds]
    records = [rec for batch in _dispatch(tasks, jobs) for rec in batch]
    records.sort(key=lambda r: (kinds.index(r["method"]), r["seed"]))
    equity = {r["method"]: r.pop("equity") for r in records if "equity" in r}
    model = records[0]["model"]
    return {
        "model": model,
        "seeds": seeds,
        "summary": summarize(records, kinds),
        "sharpe_win_fraction_vs_static": sharpe_win_fractions(records),
        "trials": records,
        "equity": equity,
    }


def sweep_grid(cfg) -> list[dict]:
    keys = [k for k in ("alpha", "beta", "s_neutral", "dead_band")]
    axes = [cfg.sweep.get(k, [getattr(cfg.policy, k)]) for k in keys]
    return [dict(zip(keys, point)) for point in itertools.product(*axes)]


def sweep(cfg, jobs: int = 1) -> list[dict]:
    """Configured policy kind at every grid point, averaged over trial seeds."""
    data = _shared_data(cfg)
    grid = sweep_grid(cfg)
    for point in grid:
        # validate up front so a bad grid fails before any work is done
        replace(cfg.policy, **point)
    kind = cfg.policy.kind
    tasks = [(run_trial, (cfg, s, (kind,), point, data)) for point in grid for s in cfg.seeds()]
    results = _dispatch(tasks, jobs)
    rows = []
    n = len(cfg.seeds())
    for gi, point in enumerate(grid):
        recs = [r for batch in results[gi * n : (gi + 1) * n] for r in batch]
        recs.sort(key=lambda r: r["seed"])
        row = {"method": kind, **point}
        for col in METRIC_KEYS:
            row[col] = _mean([r["metrics"][col] for r in recs])
        row["n_trials"] = len(recs)
        rows.append(row)
    return rows


# -- writers ----------------------------------------------------------------

def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_compare(result: dict, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "compare.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COMPARE_COLUMNS)
        for method, stats in result["summary"].items():
            writer.writerow([result["model"], method] + [_fmt(stats["mean"][c]) for c in COMPARE_COLUMNS[2:]])
    with open(out / "compare_trials.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COMPARE_COLUMNS[:2] + ["seed"] + COMPARE_COLUMNS[2:])
        for r in result["trials"]:
            writer.writerow([r["model"], r["method"], r["seed"]] + [_fmt(r["metrics"][c]) for c in COMPARE_COLUMNS[2:]])
    payload = {k: v for k, v in result.items() if k != "equity"}
    with open(out / "compare.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, allow_nan=False)
        fh.write("\n")
    for method, curve in result["equity"].items():
        with open(out / f"equity_{method}.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["day", "equity"])
            for d, e in curve:
                writer.writerow([d, repr(e)])


SWEEP_COLUMNS = ["method", "alpha", "beta", "s_neutral", "dead_band", "sharpe", "max_drawdown",
                 "win_rate", "avg_profit", "risk_exposure", "ann_return", "ann_vol", "n_trials"]


def write_sweep(rows, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sweep.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in SWEEP_COLUMNS])
