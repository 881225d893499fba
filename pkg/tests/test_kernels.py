import os
import subprocess
import sys

import numpy as np
import pytest

from hsr_alloc import kernels
from hsr_alloc.capacity import user_rule

nb = pytest.mark.skipif(kernels.numba_impl is None, reason="numba not installed")


@nb
def test_expect_log1p_backends_agree(study):
    coef, weight, _ = user_rule(study.factors[0])
    s = np.concatenate([[0.0], np.logspace(-6, 6, 57)])
    a = kernels.numpy_impl.expect_log1p(coef, weight, s)
    b = kernels.numba_impl.expect_log1p(coef, weight, s)
    assert np.allclose(a, b, rtol=1e-13, atol=0)


@nb
def test_bisect_backends_agree(study):
    coef, weight, scale = user_rule(study.factors[0])
    beta = np.linspace(0, 1, 101)
    tol = 1e-6 * study.target.c_sum
    ea, fa = kernels.numpy_impl.bisect_eta(beta, coef, weight, scale, study.target.r_th, tol, 200)
    eb, fb = kernels.numba_impl.bisect_eta(beta, coef, weight, scale, study.target.r_th, tol, 200)
    assert np.array_equal(fa, fb)
    assert np.allclose(ea[fa], eb[fb], atol=1e-12)


@nb
def test_select_rates_backends_agree(rng):
    gains = rng.standard_exponential((3, 16, 7))
    gains[0, 0, 2] = gains[0, 0, 5] = gains[0, 0].max() + 1.0  # tie, first index wins
    coef = rng.uniform(0.1, 10.0, 7)
    a = kernels.numpy_impl.select_rates(gains, coef)
    b = kernels.numba_impl.select_rates(gains, coef)
    assert a == pytest.approx(b, rel=1e-13)


def test_select_rates_tie_takes_first():
    gains = np.array([[[2.0, 2.0]]])
    coef = np.array([1.0, 3.0])
    for impl in filter(None, (kernels.numpy_impl, kernels.numba_impl)):
        assert impl.select_rates(gains, coef) == pytest.approx(np.log2(3.0))


@nb
def test_channel_block_backends_agree(rng):
    phi1 = rng.uniform(0, 2 * np.pi, (4, 3))
    phi2 = rng.uniform(0, 2 * np.pi, (4, 3))
    amp = np.sqrt(np.array([0.5, 0.3, 0.2]) / 2)
    tau = np.array([0.0, 1e-6, 2e-6])
    idx = np.arange(10, 30)
    args = (phi1, phi2, amp, tau, 900.0, 512 / 5e6, 512, idx, idx)
    a = kernels.numpy_impl.channel_block(*args)
    b = kernels.numba_impl.channel_block(*args)
    assert np.allclose(a, b, rtol=0, atol=1e-13)


def test_channel_block_matches_direct_dft(rng):
    N, T, fd = 32, 1e-4, 700.0
    phi1 = rng.uniform(0, 2 * np.pi, (1, 2))
    phi2 = rng.uniform(0, 2 * np.pi, (1, 2))
    amp = np.array([0.6, 0.3])
    tau = np.array([0.0, 3e-6])
    idx = np.arange(N)
    t = np.arange(N) * T / N
    h = np.zeros((N, N), complex)   # [n, k]
    for l in range(2):
        ray = amp[l] * (np.exp(1j * (2 * np.pi * fd * t + phi1[0, l]))
                        + np.exp(1j * (-2 * np.pi * fd * t + phi2[0, l])))
        h += ray[None, :] * np.exp(-2j * np.pi * idx[:, None] * tau[l] / T)
    ref = np.empty((N, N), complex)
    for n in range(N):
        for p in range(N):
            ref[n, p] = np.sum(h[n] * np.exp(2j * np.pi * (n - p) * np.arange(N) / N)) / N
    got = kernels.channel_block(phi1, phi2, amp, tau, fd, T, N, idx, idx)[0]
    assert np.allclose(got, ref, atol=1e-12)


def test_env_flag_selects_numpy():
    code = "from hsr_alloc import kernels; print(kernels.backend_name())"
    env = dict(os.environ, HSR_ALLOC_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True)
    assert out.stdout.strip() == "numpy"
    env["HSR_ALLOC_DISABLE_NUMBA"] = "0"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True)
    assert out.stdout.strip() == ("numba" if kernels.HAVE_NUMBA else "numpy")
