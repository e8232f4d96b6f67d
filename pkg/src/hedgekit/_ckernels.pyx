# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``_pykernels``.  Keep the two in lockstep."""
import numpy as np

from libc.math cimport sqrt, log, cos, sin, fabs, M_PI
from libc.stdint cimport uint64_t

DEF STATIC = 0
DEF PROPORTIONAL = 1
DEF THRESHOLD_DEVIATION = 2
DEF INCREMENTAL = 3

cdef double TWO_POW_M53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _rotl(uint64_t x, int k) nogil:
    return (x << k) | (x >> (64 - k))


cdef inline uint64_t _splitmix(uint64_t *state) nogil:
    cdef uint64_t z
    state[0] += 0x9E3779B97F4A7C15ULL
    z = state[0]
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t _next(uint64_t *s) nogil:
    cdef uint64_t result = _rotl(s[1] * 5, 7) * 9
    cdef uint64_t t = s[1] << 17
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


cdef void _fill_normals(uint64_t seed, double[::1] out) nogil:
    cdef uint64_t s[4]
    cdef uint64_t sm = seed
    cdef Py_ssize_t i = 0, n = out.shape[0]
    cdef double u1, u2, rad, theta
    for i in range(4):
        s[i] = _splitmix(&sm)
    i = 0
    while i < n:
        u1 = 1.0 - (_next(s) >> 11) * TWO_POW_M53
        u2 = (_next(s) >> 11) * TWO_POW_M53
        rad = sqrt(-2.0 * log(u1))
        theta = 2.0 * M_PI * u2
        out[i] = rad * cos(theta)
        if i + 1 < n:
            out[i + 1] = rad * sin(theta)
        i += 2


def normals(seed, Py_ssize_t count):
    out = np.empty(count, dtype=np.float64)
    _fill_normals(<uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF), out)
    return out


def synth_path(seed, Py_ssize_t n_days, double mu, double sigma, double kappa,
               double phi, double sigma_s):
    cdef double[::1] z = normals(seed, 2 * (n_days - 1))
    prices_arr = np.empty(n_days, dtype=np.float64)
    sent_arr = np.empty(n_days, dtype=np.float64)
    cdef double[::1] prices = prices_arr
    cdef double[::1] sent = sent_arr
    cdef double drift = mu / 252.0
    cdef double vol = sigma / sqrt(252.0)
    cdef double p = 100.0, s = 0.5, r, eps, eta
    cdef Py_ssize_t t
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
    return prices_arr, sent_arr


def rolling_mean(values, Py_ssize_t window):
    cdef double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0], t, j, start
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double acc
    for t in range(n):
        start = t - window + 1
        if start < 0:
            start = 0
        acc = 0.0
        for j in range(start, t + 1):
            acc = acc + v[j]
        out[t] = acc / <double>(t + 1 - start)
    return out_arr


def hedge_path(signal, int kind, double h0, double alpha, double beta, double s_neutral,
               double dead_band, double lo, double hi, Py_ssize_t rebalance_every):
    cdef double[::1] sig = np.ascontiguousarray(signal, dtype=np.float64)
    cdef Py_ssize_t n = sig.shape[0], i
    hedges_arr = np.empty(n, dtype=np.float64)
    pre_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] hedges = hedges_arr
    cdef double[::1] pre = pre_arr
    cdef double h = h0, raw = h0, s
    cdef double anchor = sig[0] if n > 0 else 0.0
    for i in range(n):
        s = sig[i]
        if kind == STATIC:
            raw = h0
            h = h0
        elif kind == INCREMENTAL and i == 0:
            raw = h0
            h = h0
            anchor = s
        elif i % rebalance_every == 0 and fabs(s - s_neutral) >= dead_band:
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
    return hedges_arr, pre_arr


def pnl_path(hedges, returns, double notional, double cost_rate):
    cdef double[::1] hs = np.ascontiguousarray(hedges, dtype=np.float64)
    cdef double[::1] rs = np.ascontiguousarray(returns, dtype=np.float64)
    cdef Py_ssize_t n = rs.shape[0], i
    pnl_arr = np.empty(n, dtype=np.float64)
    cum_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] pnl = pnl_arr
    cdef double[::1] cum = cum_arr
    cdef double acc = 0.0, d, h_prev
    for i in range(n):
        h_prev = hs[i]
        d = notional * (1.0 - h_prev) * rs[i] - notional * cost_rate * fabs(hs[i + 1] - h_prev)
        acc = acc + d
        pnl[i] = d
        cum[i] = acc
    return pnl_arr, cum_arr


def max_drawdown(equity):
    cdef double[::1] e = np.ascontiguousarray(equity, dtype=np.float64)
    cdef Py_ssize_t n = e.shape[0], i
    cdef double peak = e[0], worst = 0.0, dd
    for i in range(n):
        if e[i] > peak:
            peak = e[i]
        dd = (peak - e[i]) / peak
        if dd > worst:
            worst = dd
    return worst
