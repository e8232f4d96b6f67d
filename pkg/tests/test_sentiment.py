import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hedgekit.errors import EmptyInput, UnsortedInput, ZeroWeightSum
from hedgekit.policy import PolicyConfig
from hedgekit.sentiment import (
    SentimentIndexPoint, SentimentObservation, SourceWeights, action_gate, aggregate_mean,
    aggregate_weighted, daily_index, load_observations, rolling_index, write_observations,
)

TABLE3 = [("news", 0.72, 150), ("social", 0.68, 200), ("financial_report", 0.75, 120), ("survey", 0.65, 90)]


def obs(score, weight=1.0, source="news", day=0):
    return SentimentObservation(score=score, weight=weight, source=source, day=day)


def brute_weighted(pairs):
    num = 0.0
    for s, w in pairs:
        num += s * w
    den = 0.0
    for _, w in pairs:
        den += w
    return num / den


# 392.5 / 560 computed by hand
def test_weighted_table3_example():
    point = aggregate_weighted([obs(s, w, src) for src, s, w in TABLE3])
    assert point.value == pytest.approx(0.700893, abs=1e-6)
    assert point.value == pytest.approx(392.5 / 560, abs=1e-15)
    assert point.n_observations == 4


def test_weighted_single_and_constant():
    assert aggregate_weighted([obs(0.4, 7)]).value == 0.4
    assert aggregate_weighted([obs(0.6, w) for w in (3, 0.2, 99, 1)]).value == pytest.approx(0.6, abs=1e-15)


def test_mean_examples():
    assert aggregate_mean([obs(s, w, src) for src, s, w in TABLE3]).value == pytest.approx(0.70, abs=1e-12)
    assert aggregate_mean([obs(0.0), obs(1.0)]).value == 0.5


def test_equal_weights_reduce_to_mean():
    scores = [0.1, 0.35, 0.9, 0.62]
    w = aggregate_weighted([obs(s, 2.5) for s in scores]).value
    m = aggregate_mean([obs(s, 99.0) for s in scores]).value
    assert w == pytest.approx(m, abs=1e-15)


def test_aggregate_errors():
    with pytest.raises(EmptyInput):
        aggregate_weighted([])
    with pytest.raises(EmptyInput):
        aggregate_mean([])
    with pytest.raises(ZeroWeightSum):
        aggregate_weighted([obs(0.3, 0.0), obs(0.9, 0.0)])


def test_observation_validation():
    with pytest.raises(ValueError):
        obs(1.2)
    with pytest.raises(ValueError):
        obs(0.5, weight=-1)
    with pytest.raises(ValueError):
        obs(0.5, source="blog")


scores_st = st.floats(0, 1, allow_nan=False)
weights_st = st.floats(0.001, 1000, allow_nan=False)
pairs_st = st.lists(st.tuples(scores_st, weights_st), min_size=1, max_size=20)


@given(pairs_st, st.floats(1e-3, 1e3))
def test_weight_scale_invariance(pairs, c):
    a = aggregate_weighted([obs(s, w) for s, w in pairs]).value
    b = aggregate_weighted([obs(s, w * c) for s, w in pairs]).value
    assert a == pytest.approx(b, abs=1e-12)


@given(pairs_st, st.randoms())
def test_bounded_and_permutation_invariant(pairs, rnd):
    items = [obs(s, w) for s, w in pairs]
    a = aggregate_weighted(items).value
    m = aggregate_mean(items).value
    lo, hi = min(s for s, _ in pairs), max(s for s, _ in pairs)
    assert lo <= a <= hi and lo <= m <= hi
    shuffled = list(items)
    rnd.shuffle(shuffled)
    assert aggregate_weighted(shuffled).value == pytest.approx(a, abs=1e-12)
    assert aggregate_mean(shuffled).value == pytest.approx(m, abs=1e-12)


@given(pairs_st)
def test_weighted_matches_two_loop_oracle(pairs):
    got = aggregate_weighted([obs(s, w) for s, w in pairs]).value
    assert got == pytest.approx(brute_weighted(pairs), abs=1e-12)


def points(values, start=0):
    return [SentimentIndexPoint(start + i, v, 1) for i, v in enumerate(values)]


def test_rolling_examples():
    assert [p.value for p in rolling_index(points([0.2, 0.4, 0.6]), 1)] == [0.2, 0.4, 0.6]
    got = [p.value for p in rolling_index(points([0.2, 0.4, 0.6, 0.8]), 2)]
    assert got == pytest.approx([0.2, 0.3, 0.5, 0.7], abs=1e-15)


@given(st.floats(0, 1), st.integers(1, 30), st.integers(1, 40))
def test_rolling_constant(c, window, n):
    got = [p.value for p in rolling_index(points([c] * n), window)]
    assert got == pytest.approx([c] * n, abs=1e-15)


@given(st.lists(scores_st, min_size=1, max_size=30), st.integers(0, 10))
def test_rolling_wide_window_is_expanding_mean(values, extra):
    got = rolling_index(points(values), len(values) + extra)
    for t, p in enumerate(got):
        expected = sum(values[: t + 1]) / (t + 1)
        assert p.value == pytest.approx(expected, abs=1e-12)


def test_rolling_errors():
    with pytest.raises(EmptyInput):
        rolling_index([], 3)
    with pytest.raises(UnsortedInput):
        rolling_index([SentimentIndexPoint(2, 0.5, 1), SentimentIndexPoint(1, 0.5, 1)], 3)
    with pytest.raises(UnsortedInput):
        rolling_index([SentimentIndexPoint(1, 0.5, 1), SentimentIndexPoint(1, 0.5, 1)], 3)


@pytest.mark.parametrize("value, band, expected", [(0.5, 0.0, True), (0.55, 0.1, False), (0.9, 0.1, True)])
def test_action_gate(value, band, expected):
    cfg = PolicyConfig(s_neutral=0.5, dead_band=band)
    assert action_gate(SentimentIndexPoint(0, value, 1), cfg) is expected


def test_daily_index_carries_missing_days():
    observations = [obs(0.8, day=1), obs(0.2, day=1, weight=3.0), obs(0.9, day=4)]
    pts, carried = daily_index(observations, [0, 1, 2, 3, 4, 5])
    assert [p.value for p in pts] == pytest.approx([0.5, 0.35, 0.35, 0.35, 0.9, 0.9])
    assert [p.n_observations for p in pts] == [0, 2, 0, 0, 1, 0]
    assert carried == 4


def test_duplicate_source_same_day_both_kept():
    pts, _ = daily_index([obs(1.0, day=0), obs(0.0, day=0)], [0])
    assert pts[0].value == 0.5 and pts[0].n_observations == 2


def test_default_source_weights():
    w = SourceWeights()
    assert (w["news"], w["social"], w["financial_report"], w["survey"]) == (150, 200, 120, 90)


def test_observation_csv_roundtrip(tmp_path):
    rng = random.Random(3)
    items = [obs(rng.random(), rng.uniform(0, 10), rng.choice(["news", "social", "other"]), d) for d in range(30)]
    write_observations(tmp_path / "s.csv", items)
    assert load_observations(tmp_path / "s.csv") == items


def test_observation_csv_weight_defaults(tmp_path):
    (tmp_path / "s.csv").write_text("day,source,score,weight\n0,news,0.7,\n1,survey,0.4,2.5\n")
    got = load_observations(tmp_path / "s.csv")
    assert [o.weight for o in got] == [150.0, 2.5]
