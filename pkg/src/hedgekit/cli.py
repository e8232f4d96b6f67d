"""``hedgekit`` command line.

Exit codes: 0 success, 2 config error, 3 data error, 4 provider error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import backtest, harness, market
from .config import RunConfig, load_config
from .errors import ConfigError, DataError, HedgekitError
from .metrics import evaluate
from .providers import Scorer, load_texts, score_texts
from .sentiment import SourceWeights, write_observations

log = logging.getLogger("hedgekit")


def cmd_generate(cfg: RunConfig, out: Path, args) -> int:
    if cfg.synthetic is None:
        raise ConfigError("generate needs a market.synthetic section")
    prices, index = market.generate_synthetic(cfg.synthetic)
    out.mkdir(parents=True, exist_ok=True)
    market.write_csv(out / "prices.csv", prices)
    write_observations(out / "sentiment.csv", market.synthetic_observations(index))
    print(f"wrote {len(prices)} days to {out / 'prices.csv'} and {out / 'sentiment.csv'}")
    return 0


def cmd_score(cfg: RunConfig, out: Path, args) -> int:
    texts = args.texts or cfg.texts
    if not texts:
        raise ConfigError("score needs --texts or sentiment.texts")
    obs = score_texts(load_texts(texts), Scorer(cfg.provider), SourceWeights(cfg.weights))
    out.mkdir(parents=True, exist_ok=True)
    write_observations(out / "sentiment.csv", obs)
    print(f"scored {len(obs)} texts -> {out / 'sentiment.csv'}")
    return 0


def cmd_backtest(cfg: RunConfig, out: Path, args) -> int:
    data = harness.load_market(cfg)
    result = backtest.run(data.prices, data.observations, cfg.backtest)
    report = evaluate(result)
    backtest.write_artifacts(result, out, report)
    summary = report.to_dict()
    summary.pop("conventions")
    print(json.dumps({"policy": cfg.policy.kind, **summary}, indent=2))
    return 0


def cmd_compare(cfg: RunConfig, out: Path, args) -> int:
    result = harness.compare(cfg, jobs=args.jobs)
    harness.write_compare(result, out)
    for method, stats in result["summary"].items():
        sr = stats["mean"]["sharpe"]
        print(f"{method:20s} sharpe={'n/a' if sr is None else f'{sr:.3f}'} "
              f"mdd={stats['mean']['max_drawdown']:.4f}")
    return 0


def cmd_sweep(cfg: RunConfig, out: Path, args) -> int:
    rows = harness.sweep(cfg, jobs=args.jobs)
    harness.write_sweep(rows, out)
    print(f"{len(rows)} grid points -> {out / 'sweep.csv'}")
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "score": cmd_score,
    "backtest": cmd_backtest,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hedgekit", description="Sentiment-driven dynamic hedging backtester")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--out", default="out", help="output directory (default: out)")
        p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
        p.add_argument("--seed", type=int, default=None, help="override market and trial seed")
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "score":
            p.add_argument("--texts", help="day,source,text CSV (overrides sentiment.texts)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be non-negative")
            cfg = cfg.with_seed(args.seed)
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        return COMMANDS[args.command](cfg, Path(args.out), args)
    except HedgekitError as exc:
        print(f"hedgekit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"hedgekit: {exc}", file=sys.stderr)
        return DataError.exit_code


if __name__ == "__main__":
    sys.exit(main())
