import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, stats

from hsr_alloc.channel import (
    DelayProfile, FadingLaw, cdf_gain, cross_covariance, mr_diag_gain_mean, normalize_profile,
    pdf_gain, sample_gain, table_profile, time_autocorr,
)


def test_normalize_table_profile():
    prof = normalize_profile(table_profile())
    total = 1.000 + 0.368 + 0.135 + 0.050 + 0.018 + 0.007
    assert total == pytest.approx(1.578)
    for raw, got in zip(table_profile().powers, prof.powers):
        assert got == pytest.approx(raw / total)
    assert prof.delays == table_profile().delays


def test_normalize_trivial():
    assert normalize_profile(DelayProfile((0.0,), (5.0,))).powers == (1.0,)
    assert normalize_profile(DelayProfile((0.0, 1e-6), (2.0, 2.0))).powers == (0.5, 0.5)
    with pytest.raises(ValueError):
        normalize_profile(DelayProfile((0.0,), (0.0,)))


def test_time_autocorr():
    assert time_autocorr(1000.0, 0.0) == 1.0
    assert time_autocorr(1000.0, 0.25e-3) == pytest.approx(0.0, abs=1e-15)
    assert time_autocorr(0.0, 3.7) == 1.0


def test_cross_covariance():
    assert cross_covariance(1e-6, 0.0, 0.0) == 1.0
    x = 2 * math.pi * 1e-6 * 9765.625
    assert x == pytest.approx(0.06136, abs=1e-5)
    got = cross_covariance(1e-6, 5e6 / 512, 0.0, 0.0)
    assert got == pytest.approx((1 + 0.06136j) / (1 + 0.003765), rel=1e-4)
    assert abs(cross_covariance(1e-6, 1234.0, 0.25e-3, 1000.0)) < 1e-15


def test_diag_gain_limits():
    assert mr_diag_gain_mean(0.0, 1e-4, 512) == 1.0
    T = 512 / 5e6
    v = mr_diag_gain_mean(0.1 / T, T, 512)
    assert 0.9 < v < 1.0
    big = mr_diag_gain_mean(0.1, 1.0, 1 << 20)
    assert big == pytest.approx((math.sin(0.1 * math.pi) / (0.1 * math.pi)) ** 2, rel=1e-9)


def test_cdf_examples():
    assert cdf_gain(FadingLaw.exponential(1.0), 0.0) == 0.0
    assert cdf_gain(FadingLaw.max_of(50), math.log(2)) == pytest.approx(0.5**50, rel=1e-12)
    assert FadingLaw.max_of(1).expected() == FadingLaw.exponential(1.0).expected()


def test_max_of_mean_is_harmonic():
    assert FadingLaw.max_of(3).expected() == pytest.approx(1 + 1 / 2 + 1 / 3)


@pytest.mark.parametrize("law", [FadingLaw.exponential(1.0), FadingLaw.exponential(2.5),
                                 FadingLaw.max_of(50)])
def test_sampler_matches_cdf(law):
    x = sample_gain(law, np.random.default_rng(11), 100_000)
    res = stats.kstest(x, lambda t: cdf_gain(law, t))
    assert res.statistic < 0.01


@given(st.floats(0.0, 40.0), st.integers(1, 80))
@settings(max_examples=60, deadline=None)
def test_pdf_integrates_to_cdf(x, m):
    law = FadingLaw.max_of(m)
    val, _ = integrate.quad(lambda t: pdf_gain(law, t), 0.0, x, epsabs=1e-13, epsrel=1e-11,
                            limit=200)
    assert val == pytest.approx(cdf_gain(law, x), rel=1e-8, abs=1e-12)


def test_law_validation():
    with pytest.raises(ValueError):
        FadingLaw("rice")
    with pytest.raises(ValueError):
        FadingLaw.exponential(0.0)
    with pytest.raises(ValueError):
        FadingLaw.max_of(0)
