"""Pure Python implementation of the inner loops.

This is the reference backend.  ``_ckernels.pyx`` mirrors it statement for
statement; both must produce bit-identical arrays, so floating point
expressions here are written in exactly the order the C code evaluates them.

Random numbers: xoshiro256** seeded through splitmix64, converted to uniforms
with the top 53 bits, and to standard normals with the Box-Muller transform
(one pair of normals per pair of uniforms).
"""
import math

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
TWO_POW_M53 = 1.0 / 9007199254740992.0

STATIC = 0
PROPORTIONAL = 1
THRESHOLD_DEVIATION = 2
INCREMENTAL = 3


def splitmix64(state):
    """Advance a splitmix64 state; returns ``(new_state, output)``."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256:
    """xoshiro256** generator.  Only used by the pure Python backend."""

    def __init__(self, seed=None, state=None):
        if state is not None:
            self.s = [int(v) & MASK64 for v in state]
        else:
            sm = int(seed) & MASK64
            self.s = []
            for _ in range(4):
                sm, out = splitmix64(sm)
                self.s.append(out)

    def next_u64(self):
        s0, s1, s2, s3 = self.s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.s = [s0, s1, s2, s3]
        return result


def normals(seed, count):
    rng = Xoshiro256(seed)
    out = np.empty(count, dtype=np.float64)
    i = 0
    while i < count:
        u1 = 1.0 - (rng.next_u64() >> 11) * TWO_POW_M53
        u2 = (rng.next_u64() >> 11) * TWO_POW_M53
        rad = math.sqrt(-2.0 * math.log(u1))
        theta = 2.0 * math.pi * u2
        out[i] = rad * math.cos(theta)
        if i + 1 < count:
            out[i + 1] = rad * math.sin(theta)
        i += 2
    return out


def synth_path(seed, n_days, mu, sigma, kappa, phi, sigma_s):
    z = normals(seed, 2 * (n_days - 1))
    prices = np.empty(n_days, dtype=np.float64)
    sent = np.empty(n_days, dtype=np.float64)
    drift = mu / 252.0
    vol = sigma / math.sqrt(252.0)
    p = 100.0
    s = 0.5
    prices[0] = p
    sent[0] = s
    for t in range(n_days - 1):
        eps = z[2 * t]
        eta = z[2 * t + 1]
        r = drift + kappa * (s - 0.5) + vol * eps
        p = p * (1.0 + r)
        s = 0.5 + phi * (s - 0.5) + sigma_s * eta
        if s < 0.0:
            s = 0.0
        elif s > 1.0:
            s = 1.0
        prices[t + 1] = p
        sent[t + 1] = s
    return prices, sent


def rolling_mean(values, window):
    n = len(values)
    out = np.empty(n, dtype=np.float64)
    for t in range(n):
        start = t - window + 1
        if start < 0:
            start = 0
        acc = 0.0
        for j in range(start, t + 1):
            acc = acc + values[j]
        out[t] = acc / (t + 1 - start)
    return out


def hedge_path(signal, kind, h0, alpha, beta, s_neutral, dead_band, lo, hi, rebalance_every):
    n = len(signal)
    hedges = np.empty(n, dtype=np.float64)
    pre = np.empty(n, dtype=np.float64)
    h = h0
    raw = h0
    anchor = signal[0] if n else 0.0
    for i in range(n):
        s = signal[i]
        if kind == STATIC:
            raw = h0
            h = h0
        elif kind == INCREMENTAL and i == 0:
            raw = h0
            h = h0
            anchor = s
        elif i % rebalance_every == 0 and abs(s - s_neutral) >= dead_band:
            if kind == PROPORTIONAL:
                raw = h0 + alpha * s
            elif kind == THRESHOLD_DEVIATION:
                raw = h0 + beta * (s - s_neutral)
            else:
                raw = h + alpha * (s - anchor)
                anchor = s
            if raw < lo:
                h = lo
            elif raw > hi:
                h = hi
            else:
                h = raw
        hedges[i] = h
        pre[i] = raw
    return hedges, pre


def pnl_path(hedges, returns, notional, cost_rate):
    n = len(returns)
    pnl = np.empty(n, dtype=np.float64)
    cum = np.empty(n, dtype=np.float64)
    acc = 0.0
    for i in range(n):
        h_prev = hedges[i]
        d = notional * (1.0 - h_prev) * returns[i] - notional * cost_rate * abs(hedges[i + 1] - h_prev)
        acc = acc + d
        pnl[i] = d
        cum[i] = acc
    return pnl, cum


def max_drawdown(equity):
    peak = equity[0]
    worst = 0.0
    for v in equity:
        if v > peak:
            peak = v
        dd = (peak - v) / peak
        if dd > worst:
            worst = dd
    return worst
