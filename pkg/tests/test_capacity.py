import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from hsr_alloc.capacity import (
    c_sum, c_sum_reference, closed_form_log_capacity, ergodic_log_capacity, frozen_rule, g1, g2,
    snr_factors,
)
from hsr_alloc.channel import FadingLaw, sample_gain
from hsr_alloc.config import parse_config
from hsr_alloc.scenario import SystemParams, default_population, derive_trajectory
from hsr_alloc.study import Study


def test_zero_gamma():
    assert ergodic_log_capacity(0.0, FadingLaw.exponential()) == 0.0


def test_unit_gamma_exponential():
    # e * E1(1) / ln 2, E1 from scipy as an independent reference
    ref = math.e * special.exp1(1.0) / math.log(2)
    assert ref * math.log(2) == pytest.approx(0.59634, abs=1e-5)
    assert ergodic_log_capacity(1.0, FadingLaw.exponential()) == pytest.approx(ref, rel=1e-9)
    assert closed_form_log_capacity(1.0, FadingLaw.exponential()) == pytest.approx(ref, rel=1e-12)


def test_unit_gamma_monte_carlo():
    x = sample_gain(FadingLaw.exponential(), np.random.default_rng(5), 1_000_000)
    mc = np.mean(np.log2(1 + x))
    se = np.std(np.log2(1 + x)) / 1000
    assert abs(mc - ergodic_log_capacity(1.0, FadingLaw.exponential())) < 4 * se


@pytest.mark.parametrize("gamma", [1e-6, 0.01, 1.0, 100.0, 1e6])
def test_max_of_one_is_exponential(gamma):
    a = ergodic_log_capacity(gamma, FadingLaw.max_of(1))
    b = ergodic_log_capacity(gamma, FadingLaw.exponential())
    assert a == pytest.approx(b, rel=1e-9)


@pytest.mark.parametrize("m", [1, 5, 50])
@pytest.mark.parametrize("gamma", [1e-3, 0.3, 10.0, 3e4])
def test_quadrature_vs_closed_form(m, gamma):
    law = FadingLaw.max_of(m)
    assert ergodic_log_capacity(gamma, law) == pytest.approx(
        closed_form_log_capacity(gamma, law), rel=1e-8)


@pytest.mark.parametrize("law", [FadingLaw.exponential(), FadingLaw.max_of(50)])
def test_frozen_rule_accuracy(law):
    rule = frozen_rule(law)
    s = np.logspace(-7, 9, 17)
    ref = [closed_form_log_capacity(v, law) for v in s]
    assert np.allclose(rule.expect(s), ref, rtol=1e-8, atol=0)


def test_c_sum_matches_reference(cfg):
    t = c_sum(cfg.params, cfg.population)
    assert t.c_sum > 0
    assert t.c_sum == pytest.approx(c_sum_reference(cfg.params, cfg.population), rel=1e-8)
    assert t.r_th == pytest.approx(0.5 * t.c_sum)


def test_c_sum_rho_zero_and_tiny_power():
    p0 = SystemParams(rho=0.0)
    assert c_sum(p0, default_population(p0)).r_th == 0.0
    p = SystemParams(power=1e-30)
    assert c_sum(p, default_population(p)).c_sum < 1e-12


def test_g1_trivial(study):
    f = study.factors[49 + 20]
    assert g1(0.0, 0.4, f) == 0.0
    assert g1(0.3, 0.0, f) == 0.0
    assert 0.0 <= g1(1.0, 5e-324, f) < 1e-200
    f0 = study.factors[49]
    assert g1(0.6, 0.4, f0, True) == g1(0.6, 0.4, f0, False)


@given(st.floats(0, 1), st.floats(0, 1), st.integers(-49, 49))
@settings(max_examples=100, deadline=None)
def test_ici_only_hurts(eta, beta, i):
    f = _STUDY.factors[i + 49]
    assert g1(eta, beta, f, False) >= g1(eta, beta, f, True)


def test_g2_trivial(study):
    f = study.factors[0]
    assert g2(1.0, 0.3, f) == 0.0
    assert g2(0.3, 1.0, f) == 0.0
    assert g2(0.0, 0.0, f) == study.target.c_sum


def test_g2_monotone(study):
    f = study.factors[0]
    eta = np.linspace(0, 1, 51)
    assert np.all(np.diff(g2(eta, 0.3, f)) < 0)
    beta = np.linspace(0, 1, 51)
    assert np.all(np.diff(g2(0.2, beta, f)) <= 0)


def test_g1_increasing(study):
    f = study.factors[49 + 30]
    v = g1(np.linspace(0, 1, 51), 0.4, f)
    assert np.all(np.diff(v) > 0)
    v = g1(0.5, np.linspace(0, 1, 51), f)
    assert np.all(np.diff(v) > 0)


def test_doppler_attenuation_switch(cfg):
    tr = derive_trajectory(cfg.params)
    on = snr_factors(tr.period(49), cfg.params, cfg.population)
    off = snr_factors(tr.period(49), cfg.params, cfg.population, doppler_attenuation=False)
    assert on.gamma0 < off.gamma0
    c = snr_factors(tr.period(0), cfg.params, cfg.population)
    assert c.gamma0 == snr_factors(tr.period(0), cfg.params, cfg.population,
                                   doppler_attenuation=False).gamma0


# hypothesis does not mix with function-scoped fixtures
_STUDY = Study(parse_config())
