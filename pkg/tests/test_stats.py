import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from truncvar.montecarlo.stats import SampleTooSmallError, ks_distance, ks_statistic, ks_two_sample, moment_summary


def test_hand_computed_distance():
    # F_n jumps to 0.8 just below x = 2 while Phi(2) = 0.97725
    d = ks_distance([-1.0, -0.5, 0.0, 0.5, 2.0])
    assert d == pytest.approx(0.5 * math.erfc(-2 / math.sqrt(2)) - 0.8, abs=1e-15)
    assert d == pytest.approx(0.17724987, abs=1e-8)


@pytest.mark.parametrize("x", [0.0, 1.3, -2.0])
def test_constant_sample(x):
    phi = 0.5 * math.erfc(-x / math.sqrt(2))
    d, p = ks_statistic(np.full(500, x))
    assert d == pytest.approx(max(phi, 1 - phi), abs=1e-12)
    assert p < 1e-50


@given(st.integers(0, 2**32 - 1), st.integers(20, 400), st.floats(-3, 3), st.floats(0.1, 5))
def test_matches_scipy(seed, n, loc, scale):
    x = np.random.default_rng(seed).normal(loc, scale, n)
    d, p = ks_statistic(x, loc, scale)
    ref = stats.kstest((x - loc) / scale, "norm", method="asymp")
    assert d == pytest.approx(ref.statistic, abs=1e-12)
    assert p == pytest.approx(ref.pvalue, rel=1e-9, abs=1e-300)


def test_self_test_rarely_rejects():
    ps = [ks_statistic(np.random.default_rng(s).standard_normal(10_000))[1] for s in range(300)]
    assert np.mean(np.asarray(ps) > 1e-3) >= 0.99
    # p-values of a correct null are roughly uniform
    assert stats.kstest(ps, "uniform").pvalue > 1e-3


def test_detects_wrong_scale():
    x = np.random.default_rng(0).normal(0, 1.2, 5000)
    assert ks_statistic(x)[1] < 1e-6
    assert ks_statistic(x, scale=1.2)[1] > 1e-3


def test_custom_cdf():
    x = np.random.default_rng(1).exponential(0.3, 2000)
    d, p = ks_statistic(x, scale=0.3, cdf=lambda z: -np.expm1(-z))
    assert p > 1e-3


def test_refuses_tiny_samples():
    with pytest.raises(SampleTooSmallError):
        ks_statistic(np.zeros(19))
    with pytest.raises(SampleTooSmallError):
        ks_two_sample(np.zeros(19), np.zeros(100))
    with pytest.raises(ValueError):
        ks_statistic(np.zeros(50), scale=0.0)


def test_two_sample():
    rng = np.random.default_rng(2)
    a, b = rng.standard_normal(3000), rng.standard_normal(2000)
    d, p = ks_two_sample(a, b)
    assert p > 1e-3
    assert d == pytest.approx(stats.ks_2samp(a, b).statistic)
    assert ks_two_sample(a, b + 0.3)[1] < 1e-6


def test_moment_summary():
    s = moment_summary([1.0, 2.0, 3.0, 4.0])
    assert s["n"] == 4 and s["mean"] == 2.5
    assert s["var"] == pytest.approx(5 / 3)
    assert s["se"] == pytest.approx(math.sqrt(5 / 12))
    assert moment_summary([7.0])["var"] == 0.0
