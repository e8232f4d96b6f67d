import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hedgekit import kernels
from hedgekit.errors import InvalidConfig
from hedgekit.policy import (
    PolicyConfig, PortfolioState, hedge_incremental, hedge_proportional, hedge_static,
    hedge_threshold_deviation, portfolio_update,
)

KIND = {"static": 0, "proportional": 1, "threshold_deviation": 2, "incremental": 3}


def path(signal, cfg, rebalance_every=1):
    h, pre = kernels.hedge_path(np.asarray(signal, dtype=float), KIND[cfg.kind], cfg.h0, cfg.alpha, cfg.beta,
                                cfg.s_neutral, cfg.dead_band, cfg.clamp_lo, cfg.clamp_hi, rebalance_every)
    return h, pre


def test_static():
    assert hedge_static(PolicyConfig(kind="static", h0=0.75)) == 0.75
    assert hedge_static(PolicyConfig(kind="static", h0=0.0)) == 0.0
    h, _ = path([0.1, 0.9, 0.3], PolicyConfig(kind="static", h0=0.75))
    assert list(h) == [0.75] * 3


def test_proportional_examples():
    cfg = PolicyConfig(kind="proportional", h0=0.5, alpha=0.4)
    assert hedge_proportional(0.700893, cfg) == pytest.approx(0.780357, abs=1e-6)
    assert hedge_proportional(0.3, PolicyConfig(kind="proportional", h0=0.5, alpha=0.0)) == 0.5
    assert hedge_proportional(0.9, PolicyConfig(kind="proportional", h0=0.9, alpha=0.5)) == 1.0


def test_threshold_examples():
    cfg = PolicyConfig(kind="threshold_deviation", h0=0.65, beta=-0.5, s_neutral=0.5)
    assert hedge_threshold_deviation(0.5, cfg) == 0.65
    assert hedge_threshold_deviation(0.1, cfg) == pytest.approx(0.85, abs=1e-15)
    flat = PolicyConfig(kind="threshold_deviation", h0=0.65, beta=0.0)
    assert all(hedge_threshold_deviation(s, flat) == hedge_static(flat) for s in np.linspace(0, 1, 11))


def test_incremental_examples():
    cfg = PolicyConfig(kind="incremental", alpha=-0.4)
    assert hedge_incremental(0.75, 0.0, cfg) == 0.75
    assert hedge_incremental(0.75, 0.25, cfg) == pytest.approx(0.65, abs=1e-15)
    assert hedge_incremental(0.75, 0.25, cfg, gate_open=False) == 0.75


def test_config_validation():
    with pytest.raises(InvalidConfig):
        PolicyConfig(kind="dynamic")
    with pytest.raises(InvalidConfig):
        PolicyConfig(h0=1.2)
    with pytest.raises(InvalidConfig):
        PolicyConfig(clamp_lo=0.5, clamp_hi=0.5, h0=0.5)
    with pytest.raises(InvalidConfig):
        PolicyConfig(s_neutral=1.5)


signals = st.lists(st.floats(0, 1), min_size=1, max_size=60)
coef = st.floats(-3, 3)


@given(signals, st.sampled_from(list(KIND)), coef, coef, st.floats(0, 1), st.floats(0, 0.3), st.integers(1, 7))
def test_kernel_path_matches_scalar_laws(sig, kind, alpha, beta, h0, band, k):
    cfg = PolicyConfig(kind=kind, h0=h0, alpha=alpha, beta=beta, dead_band=band)
    h, _ = path(sig, cfg, k)
    expected = []
    prev, anchor = h0, sig[0]
    for i, s in enumerate(sig):
        gate = abs(s - cfg.s_neutral) >= band and i % k == 0
        if kind == "static" or (kind == "incremental" and i == 0):
            cur = hedge_static(cfg)
        elif not gate:
            cur = prev
        elif kind == "proportional":
            cur = hedge_proportional(s, cfg)
        elif kind == "threshold_deviation":
            cur = hedge_threshold_deviation(s, cfg)
        else:
            cur = hedge_incremental(prev, s - anchor, cfg)
            anchor = s
        expected.append(cur)
        prev = cur
    assert list(h) == expected


@given(signals, st.sampled_from(list(KIND)), coef, coef, st.floats(0, 0.45))
def test_clamping(sig, kind, alpha, beta, width):
    lo, hi = 0.5 - width - 0.01, 0.5 + width + 0.01
    cfg = PolicyConfig(kind=kind, h0=0.5, alpha=alpha, beta=beta, clamp_lo=lo, clamp_hi=hi)
    h, _ = path(sig, cfg)
    assert np.all((h >= lo) & (h <= hi))


@given(signals, st.floats(0, 1), st.integers(1, 5))
def test_reduction_to_static_is_bit_exact(sig, h0, k):
    static, _ = path(sig, PolicyConfig(kind="static", h0=h0), k)
    thr, _ = path(sig, PolicyConfig(kind="threshold_deviation", h0=h0, beta=0.0), k)
    inc, _ = path(sig, PolicyConfig(kind="incremental", h0=h0, alpha=0.0), k)
    assert static.tobytes() == thr.tobytes() == inc.tobytes()


@pytest.mark.parametrize("kind", ["threshold_deviation", "incremental"])
def test_neutral_fixed_point(kind):
    cfg = PolicyConfig(kind=kind, h0=0.65, s_neutral=0.5)
    h, _ = path([0.5] * 40, cfg)
    assert list(h) == [0.65] * 40


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0.01, 3))
def test_threshold_monotone(a, b, mag):
    lo, hi = min(a, b), max(a, b)
    neg = PolicyConfig(h0=0.5, beta=-mag)
    pos = PolicyConfig(h0=0.5, beta=mag)
    assert hedge_threshold_deviation(lo, neg) >= hedge_threshold_deviation(hi, neg)
    assert hedge_threshold_deviation(lo, pos) <= hedge_threshold_deviation(hi, pos)


@given(st.lists(st.floats(0.45, 0.55), min_size=2, max_size=50), st.floats(-0.5, 0.5))
def test_incremental_telescopes(sig, alpha):
    cfg = PolicyConfig(kind="incremental", h0=0.5, alpha=alpha)
    h, pre = path(sig, cfg)
    assert np.array_equal(h, pre)  # no clamp binds in this range
    assert h[-1] - h[0] == pytest.approx(alpha * (sig[-1] - sig[0]), abs=1e-12)


def test_pre_clamp_is_recorded():
    cfg = PolicyConfig(kind="proportional", h0=0.9, alpha=0.5)
    h, pre = path([0.9], cfg)
    assert h[0] == 1.0 and pre[0] == pytest.approx(1.35)


def test_portfolio_update_examples():
    s = PortfolioState(day=0, hedge_ratio=1.0, position_value=10000.0)
    assert portfolio_update(s, 1.0, 0.37, 0.0).daily_pnl == 0.0
    s = PortfolioState(day=0, hedge_ratio=0.5, position_value=10000.0)
    nxt = portfolio_update(s, 0.5, 0.02, 0.0)
    assert nxt.daily_pnl == pytest.approx(100.0) and nxt.cumulative_pnl == pytest.approx(100.0) and nxt.day == 1
    s = PortfolioState(day=3, hedge_ratio=0.75, position_value=10000.0, cumulative_pnl=12.0)
    nxt = portfolio_update(s, 0.65, 0.0, 0.0005)
    assert nxt.daily_pnl == pytest.approx(-0.5) and nxt.cumulative_pnl == pytest.approx(11.5)
    assert nxt.hedge_ratio == 0.65


@given(st.lists(st.floats(-0.1, 0.1), min_size=1, max_size=100))
def test_zero_cost_full_hedge_never_moves(returns):
    state = PortfolioState(0, 1.0, 10000.0)
    for r in returns:
        state = portfolio_update(state, 1.0, r, 0.0)
        assert state.cumulative_pnl == 0.0


@given(st.lists(st.floats(0, 1), min_size=2, max_size=40), st.lists(st.floats(-0.05, 0.05), min_size=40, max_size=40))
def test_kernel_pnl_matches_portfolio_update(hedges, returns):
    hs = np.array(hedges)
    rs = np.array(returns[: len(hs) - 1])
    pnl, cum = kernels.pnl_path(hs, rs, 10000.0, 0.0005)
    state = PortfolioState(0, hs[0], 10000.0)
    for i, r in enumerate(rs):
        state = portfolio_update(state, hs[i + 1], r, 0.0005)
        assert pnl[i] == state.daily_pnl
        assert cum[i] == state.cumulative_pnl
