import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from demo2bt import infotheory as it

GRID = it.QuantizationGrid(0.01)


def counting_entropy(samples, grid):
    """Independent oracle: -sum p log2 p over the binned distribution."""
    codes = grid.bin_indices(samples)
    _, counts = np.unique(codes, return_counts=True)
    p = counts / counts.sum()
    return float(-np.sum(p * np.log2(p)))


def counting_joint(x, y, grid):
    pairs = list(zip(grid.bin_indices(x).tolist(), grid.bin_indices(y).tolist()))
    _, counts = np.unique(np.array(pairs), axis=0, return_counts=True)
    p = counts / counts.sum()
    return float(-np.sum(p * np.log2(p)))


# --- frozen counting oracles -------------------------------------------------

def test_entropy_frozen_example():
    # bins: [0, 0, 1, 2] -> counts (2, 1, 1) -> H = 1.5 bits exactly
    samples = [0.001, 0.002, 0.011, 0.025]
    assert it.entropy(samples, GRID) == pytest.approx(1.5, abs=1e-12)


def test_entropy_constant_is_zero():
    assert it.entropy([0.123] * 40, GRID) == 0.0


def test_entropy_uniform_bins():
    # 8 samples in 8 distinct bins -> exactly 3 bits
    samples = np.arange(8) * 0.01 + 0.005
    assert it.entropy(samples, GRID) == pytest.approx(3.0, abs=1e-12)


def test_joint_entropy_frozen_example():
    # pairs: (0,0), (0,0), (1,0), (1,1) -> counts (2, 1, 1) -> 1.5 bits
    x = [0.000, 0.005, 0.015, 0.012]
    y = [0.001, 0.002, 0.003, 0.017]
    assert it.joint_entropy(x, y, GRID) == pytest.approx(1.5, abs=1e-12)


def test_mi_frozen_example():
    # H(x) = 1, H(y) = 1, H(x,y) = 1 for perfectly coupled signals -> MI = 1
    x = [0.001, 0.011, 0.001, 0.011]
    y = [0.021, 0.031, 0.021, 0.031]
    assert it.mutual_information(x, y, GRID) == pytest.approx(1.0, abs=1e-12)


def test_mi_independent_is_zero():
    x = [0.001, 0.001, 0.011, 0.011]
    y = [0.021, 0.031, 0.021, 0.031]
    assert it.mutual_information(x, y, GRID) == 0.0


def test_co_information_two_signals_reduces_to_mi():
    rng = np.random.default_rng(7)
    x = rng.normal(0, 0.05, 40)
    y = x + rng.normal(0, 0.002, 40)
    assert it.co_information([x, y], GRID) == pytest.approx(
        it.mutual_information(x, y, GRID), abs=1e-9)


def test_co_information_three_identical_signals():
    # all pairwise and triple joints equal H -> inclusion-exclusion gives H
    x = np.arange(8) * 0.01
    h = it.entropy(x, GRID)
    assert it.co_information([x, x, x], GRID) == pytest.approx(h, abs=1e-9)


def test_co_information_requires_two_signals():
    with pytest.raises(ValueError):
        it.co_information([np.arange(4.0)], GRID)


# --- properties --------------------------------------------------------------

samples_strategy = st.lists(st.floats(-1, 1, allow_nan=False, allow_infinity=False),
                            min_size=2, max_size=40)


@given(samples_strategy)
def test_entropy_matches_counting_oracle(xs):
    assert it.entropy(xs, GRID) == pytest.approx(counting_entropy(xs, GRID), abs=1e-9)


@given(samples_strategy)
def test_entropy_bounds(xs):
    h = it.entropy(xs, GRID)
    assert 0.0 <= h <= np.log2(len(xs)) + 1e-9


@settings(max_examples=50)
@given(samples_strategy, st.integers(0, 1000))
def test_mi_symmetry_and_nonnegativity(xs, seed):
    rng = np.random.default_rng(seed)
    ys = rng.normal(0, 0.03, len(xs))
    mi_xy = it.mutual_information(xs, ys, GRID)
    mi_yx = it.mutual_information(ys, xs, GRID)
    assert mi_xy == pytest.approx(mi_yx, abs=1e-9)
    assert mi_xy >= 0.0


@given(samples_strategy)
def test_mi_self_equals_entropy(xs):
    assert it.mutual_information(xs, xs, GRID) == pytest.approx(
        it.entropy(xs, GRID), abs=1e-9)


@given(samples_strategy, st.integers(-5, 5))
def test_grid_translation_invariance(xs, k):
    # shifting both the data and the origin by whole bins leaves H unchanged;
    # samples are snapped to bin centers so float rounding cannot flip a bin
    centers = (np.floor(np.asarray(xs) / GRID.q) + 0.5) * GRID.q
    shifted = it.QuantizationGrid(GRID.q, origin=GRID.origin + k * GRID.q)
    assert it.entropy(centers + k * GRID.q, shifted) == pytest.approx(
        it.entropy(centers, GRID), abs=1e-9)


# --- sliding estimators ------------------------------------------------------

def test_sliding_entropy_matches_batch():
    rng = np.random.default_rng(3)
    v = np.cumsum(rng.normal(0, 0.01, 200))
    w = 40
    sl = it.sliding_entropy(v, w, GRID)
    for t in range(w // 2, 200 - w // 2):
        lo, hi = t - w // 2, t + w // 2
        assert sl[t] == pytest.approx(it.entropy(v[lo:hi], GRID), abs=1e-9)
    assert np.all(np.isnan(sl[: w // 2]))


def test_sliding_joint_and_mi_match_batch():
    rng = np.random.default_rng(4)
    x = np.cumsum(rng.normal(0, 0.01, 120))
    y = x + rng.normal(0, 0.005, 120)
    w = 40
    sj = it.sliding_joint_entropy(x, y, w, GRID)
    sm = it.sliding_mi(x, y, w, GRID)
    for t in range(w // 2, 120 - w // 2):
        lo, hi = t - w // 2, t + w // 2
        assert sj[t] == pytest.approx(it.joint_entropy(x[lo:hi], y[lo:hi], GRID), abs=1e-9)
        assert sm[t] == pytest.approx(it.mutual_information(x[lo:hi], y[lo:hi], GRID), abs=1e-9)


def test_sliding_entropy_nan_window_propagates():
    v = np.zeros(100)
    v[50] = np.nan
    sl = it.sliding_entropy(v, 40, GRID)
    assert np.isnan(sl[50])
    assert np.isnan(sl[31])  # window [11, 51) touches the gap
    assert sl[30] == 0.0  # window [10, 50) does not


def test_sliding_entropy_constant_series_is_exactly_zero():
    v = np.full(100, 0.90273923)
    sl = it.sliding_entropy(v, 40, GRID)
    assert np.all(sl[20:80] == 0.0)


# --- trend sign --------------------------------------------------------------

def test_trend_sign_negative():
    series = np.linspace(1.0, 0.0, 30)
    assert it.trend_sign(series, 25, 20) == "negative"


def test_trend_sign_majority_rule():
    # exactly half decreasing is a tie -> non_negative
    series = np.array([0.0, 1.0] * 15, dtype=float)
    assert it.trend_sign(series, 25, 20) == "non_negative"


def test_trend_sign_flat_is_non_negative():
    assert it.trend_sign(np.zeros(30), 25, 20) == "non_negative"


def test_trend_sign_insufficient_history_raises():
    with pytest.raises(ValueError):
        it.trend_sign(np.zeros(30), 10, 20)
    assert it.trend_sign_or_default(np.zeros(30), 10, 20) == "non_negative"


def test_trend_sign_nan_in_window_raises():
    series = np.linspace(1.0, 0.0, 30)
    series[20] = np.nan
    with pytest.raises(ValueError):
        it.trend_sign(series, 25, 20)
