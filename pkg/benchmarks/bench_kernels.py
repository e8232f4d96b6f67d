"""Time the compiled kernels against the pure Python reference.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from hedgekit import harness, kernels
from hedgekit.config import parse_config


def cases(backend):
    prices, sent = backend.synth_path(42, 5040, 0.05, 0.2, 0.02, 0.9, 0.05)
    signal = backend.rolling_mean(sent, 5)
    hedges, _ = backend.hedge_path(signal, kernels.THRESHOLD_DEVIATION, 0.65, -0.4, -0.5, 0.5, 0.0, 0.0, 1.0, 1)
    returns = prices[1:] / prices[:-1] - 1.0
    equity = 10000.0 + backend.pnl_path(hedges, returns, 10000.0, 0.0005)[1]
    return {
        "synth_path (5040 days)": lambda: backend.synth_path(42, 5040, 0.05, 0.2, 0.02, 0.9, 0.05),
        "rolling_mean": lambda: backend.rolling_mean(sent, 5),
        "hedge_path": lambda: backend.hedge_path(signal, kernels.INCREMENTAL, 0.65, -0.4, -0.5, 0.5, 0.02,
                                                 0.0, 1.0, 3),
        "pnl_path": lambda: backend.pnl_path(hedges, returns, 10000.0, 0.0005),
        "max_drawdown": lambda: backend.max_drawdown(np.asarray(equity)),
    }


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_compare(repeat):
    # end to end: four policies on 20 default synthetic markets
    cfg = parse_config({"trials": {"n_seeds": 20}})
    return best(lambda: harness.compare(cfg), repeat)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if kernels.compiled is None:
        print("compiled kernels are not built; only the pure backend is available")
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'kernel':26s}{'python [ms]':>14s}{'cython [ms]':>14s}{'speedup':>10s}")
    py_cases = cases(kernels.pure)
    c_cases = cases(kernels.compiled) if kernels.compiled is not None else {}
    for name, fn in py_cases.items():
        tp = best(fn, args.repeat) * 1e3
        if name in c_cases:
            tc = best(c_cases[name], args.repeat) * 1e3
            print(f"{name:26s}{tp:14.3f}{tc:14.3f}{tp / tc:10.1f}x")
        else:
            print(f"{name:26s}{tp:14.3f}{'-':>14s}{'-':>10s}")
    print(f"{'compare, 20 seeds':26s}{'':14s}{bench_compare(args.repeat) * 1e3:14.3f}  ({kernels.BACKEND})")


if __name__ == "__main__":
    main()
