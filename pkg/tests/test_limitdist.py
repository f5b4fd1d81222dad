import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq
from scipy.special import gammainc

from hdmean.errors import InvalidProbability, NotPositiveSemidefinite
from hdmean.limitdist import (
    EmpiricalCdf,
    WeightedChiSquare,
    ks_distance,
    limit_from_covariance,
    power_law_spectrum,
    sample_weighted_chisquare,
)
from hdmean.rng import stream

samples = st.lists(st.integers(-20, 20).map(float), min_size=1, max_size=30)


def chi2_quantile(p, k):
    """Oracle: invert the chi-square CDF (regularised lower gamma) by bracketing."""
    return brentq(lambda x: gammainc(k / 2, x / 2) - p, 0.0, 200.0, xtol=1e-12)


def brute_ks(a, b):
    """Oracle: scan both step functions on every jump point and every gap midpoint."""
    pts = sorted(set(a) | set(b))
    probes = pts + [(u + v) / 2 for u, v in zip(pts, pts[1:])] + [pts[0] - 1, pts[-1] + 1]
    fa = lambda x: sum(v <= x for v in a) / len(a)
    fb = lambda x: sum(v <= x for v in b) / len(b)
    return max(abs(fa(x) - fb(x)) for x in probes)


def test_zero_weights_give_zero_draws():
    draws = sample_weighted_chisquare(WeightedChiSquare([0.0, 0.0, 0.0]), 1000, stream(1))
    assert np.all(draws == 0.0)


def test_chi2_1_mean():
    draws = sample_weighted_chisquare(WeightedChiSquare([1.0]), 1_000_000, stream(2))
    assert abs(draws.mean() - 1.0) < 0.005


def test_chi2_5_upper_quantile():
    oracle = chi2_quantile(0.95, 5)
    assert oracle == pytest.approx(11.0705, abs=1e-4)
    draws = sample_weighted_chisquare(WeightedChiSquare([1.0] * 5), 10_000_000, stream(3))
    assert abs(EmpiricalCdf(draws).quantile(0.95) - oracle) < 0.02


def test_weighted_mean_within_four_sigma():
    lam = np.array([2.0, 0.7, 0.7, 0.1, 0.01])
    model = WeightedChiSquare(lam)
    draws = sample_weighted_chisquare(model, 1_000_000, stream(4))
    assert abs(draws.mean() - model.trace) < 4 * np.sqrt(model.variance / draws.size)


def test_weights_validated():
    with pytest.raises(ValueError):
        WeightedChiSquare([1.0, -0.5])
    with pytest.raises(ValueError):
        sample_weighted_chisquare(WeightedChiSquare([1.0]), 0, stream(0))


def test_cdf_examples():
    f = EmpiricalCdf([3.0, 1.0, 2.0])
    assert f.cdf(0.5) == 0.0
    assert f.cdf(3.0) == 1.0 and f.cdf(10.0) == 1.0
    assert f.cdf(2.0) == pytest.approx(2 / 3)
    np.testing.assert_array_equal(f([0.0, 1.0, 2.5]), [0.0, 1 / 3, 2 / 3])


def test_quantile_examples():
    f = EmpiricalCdf([10.0, 40.0, 20.0, 30.0])
    assert f.quantile(0.5) == 20.0
    assert f.quantile(1 - 1e-12) == 40.0
    assert EmpiricalCdf([0.0, 2.0]).quantile(0.25) == 0.0
    for p in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(InvalidProbability):
            f.quantile(p)


@given(samples)
def test_quantile_of_cdf_does_not_exceed_point(values):
    f = EmpiricalCdf(values)
    for x in values:
        p = f.cdf(x)
        if p < 1:
            assert f.quantile(p) <= x


def test_ks_examples():
    assert ks_distance([1.0, 2.0, 2.0], [2.0, 1.0, 2.0]) == 0.0
    assert ks_distance([0.0], [1.0]) == 1.0
    assert ks_distance([1.0, 3.0], [2.0]) == 0.5


@given(samples, samples)
def test_ks_matches_brute_force(a, b):
    d = ks_distance(a, b)
    assert d == pytest.approx(brute_ks(a, b), abs=1e-12)
    assert d == ks_distance(b, a)
    assert 0.0 <= d <= 1.0


def test_limit_from_covariance_examples():
    np.testing.assert_array_equal(limit_from_covariance(np.eye(4)).lambdas, np.ones(4))
    np.testing.assert_array_equal(limit_from_covariance(np.zeros((3, 3))).lambdas, np.zeros(3))
    np.testing.assert_allclose(limit_from_covariance([[2.0, 1.0], [1.0, 2.0]]).lambdas, [3.0, 1.0], atol=1e-14)
    assert limit_from_covariance(np.eye(2)).truncation_tail == 0.0


def test_limit_from_covariance_clamps_rounding_and_rejects_indefinite():
    lam = limit_from_covariance(np.diag([1.0, -1e-13])).lambdas
    np.testing.assert_array_equal(lam, [1.0, 0.0])
    with pytest.raises(NotPositiveSemidefinite):
        limit_from_covariance([[1.0, 2.0], [2.0, 1.0]])


def test_power_law_tail_matches_partial_sums():
    law = power_law_spectrum(2.0, 2.0, 10)
    brute_tail = 2.0 * sum(k**-2.0 for k in range(11, 2_000_001)) + 2.0 / 2_000_000.5  # integral remainder
    assert law.truncation_tail == pytest.approx(brute_tail, rel=1e-6)
    assert law.trace + law.truncation_tail == pytest.approx(2.0 * np.pi**2 / 6, rel=1e-12)


def test_truncation_error_shrinks_with_level():
    m = 100_000
    ks = []
    for i, l in enumerate((5, 10, 20, 40)):
        short = sample_weighted_chisquare(power_law_spectrum(1.0, 2.0, l), m, stream(31, i, 0))
        long = sample_weighted_chisquare(power_law_spectrum(1.0, 2.0, 2 * l), m, stream(31, i, 1))
        ks.append(ks_distance(short, long))
    assert all(b < a for a, b in zip(ks, ks[1:])), ks
