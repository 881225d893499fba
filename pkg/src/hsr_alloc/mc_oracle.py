"""Brute-force references: a two-path tapped-delay-line channel pushed through
the receiver DFT, and slot-by-slot max-gain scheduling of the local users.

Random numbers are always drawn here with numpy ``Generator`` streams and
handed to the kernels, so both kernel backends see identical inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .channel import DelayProfile, normalize_profile
from .scenario import SystemParams, UserPopulation, pathloss_linear


@dataclass(frozen=True)
class TwoPathTap:
    """One tap: two equal-power rays at +/- fD with independent phases."""

    power: float
    fd: float
    phi1: float
    phi2: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        w = 2.0 * np.pi * self.fd * t
        amp = np.sqrt(self.power / 2.0)
        return amp * (np.exp(1j * (w + self.phi1)) + np.exp(1j * (-w + self.phi2)))


def realize_two_path_tap(power: float, fd: float, rng: np.random.Generator) -> TwoPathTap:
    if power <= 0:
        raise ValueError("tap power must be positive")
    phi1, phi2 = rng.uniform(0.0, 2.0 * np.pi, size=2)
    return TwoPathTap(float(power), float(fd), float(phi1), float(phi2))


@dataclass(frozen=True)
class ChannelRealization:
    phi1: np.ndarray      # (taps,)
    phi2: np.ndarray
    n_idx: np.ndarray
    p_idx: np.ndarray
    H: np.ndarray         # (len(n_idx), len(p_idx)) complex


def _draw_phases(rng, n_trials, n_taps):
    ph = rng.uniform(0.0, 2.0 * np.pi, size=(n_trials, 2, n_taps))
    return ph[:, 0, :], ph[:, 1, :]


def _window_indices(params, index_window):
    if index_window is None:
        idx = np.arange(params.n_subcarriers)
    else:
        idx = np.asarray(index_window, dtype=np.int64)
    if idx.min() < 0 or idx.max() >= params.n_subcarriers:
        raise ValueError("index window must lie within [0, N)")
    return idx


def dft_channel_matrix(profile: DelayProfile, fd: float, params: SystemParams,
                       index_window=None, rng: np.random.Generator | None = None,
                       phases=None) -> ChannelRealization:
    """One realisation of H(n, p) for n, p in ``index_window``."""
    profile = normalize_profile(profile)
    idx = _window_indices(params, index_window)
    if phases is None:
        rng = rng if rng is not None else np.random.default_rng()
        phi1, phi2 = _draw_phases(rng, 1, profile.n_taps)
    else:
        phi1, phi2 = (np.atleast_2d(np.asarray(p, float)) for p in phases)
    amp = np.sqrt(np.asarray(profile.powers) / 2.0)
    H = kernels.channel_block(phi1, phi2, amp, np.asarray(profile.delays, float), fd,
                              params.symbol_duration, params.n_subcarriers, idx, idx)
    return ChannelRealization(phi1[0], phi2[0], idx, idx, H[0])


def sampled_lattice(real: ChannelRealization, profile: DelayProfile, fd: float,
                    params: SystemParams) -> np.ndarray:
    """h(kT/N, n/T) for the realisation's rows (k along the last axis)."""
    profile = normalize_profile(profile)
    N, T = params.n_subcarriers, params.symbol_duration
    t = np.arange(N) * T / N
    out = np.zeros((real.n_idx.size, N), dtype=complex)
    for l, (tau, pw) in enumerate(zip(profile.delays, profile.powers)):
        tap = TwoPathTap(pw, fd, real.phi1[l], real.phi2[l])
        out += tap(t)[None, :] * np.exp(-2j * np.pi * real.n_idx[:, None] * tau / T)
    return out


def mc_ici_moments(profile: DelayProfile, fd: float, params: SystemParams, trials: int,
                   rng: np.random.Generator, max_lag: int = 5, batch: int = 500):
    """Empirical E|H(n,p)|^2 for lags k = n - p in [-max_lag, max_lag].

    Returns (lags, mean, stderr), one sample per trial taken from the mid-band
    row of the DFT block.
    """
    profile = normalize_profile(profile)
    N = params.n_subcarriers
    centre = N // 2
    idx = np.arange(centre - max_lag, centre + max_lag + 1) % N
    amp = np.sqrt(np.asarray(profile.powers) / 2.0)
    tau = np.asarray(profile.delays, float)
    lags = np.arange(-max_lag, max_lag + 1)
    per_trial = []
    done = 0
    while done < trials:
        n = min(batch, trials - done)
        phi1, phi2 = _draw_phases(rng, n, profile.n_taps)
        # only the centre row is needed for every lag
        H = kernels.channel_block(phi1, phi2, amp, tau, fd, params.symbol_duration, N,
                                  idx[max_lag:max_lag + 1], idx)
        # H[:, 0, c] has k = n - p = centre - idx[c] = max_lag - c
        per_trial.append(np.abs(H[:, 0, ::-1]) ** 2)
        done += n
    samples = np.concatenate(per_trial)
    return lags, samples.mean(axis=0), samples.std(axis=0, ddof=1) / np.sqrt(samples.shape[0])


def mc_sum_capacity(params: SystemParams, pop: UserPopulation, slots: int,
                    rng: np.random.Generator, batch: int = 50) -> float:
    """Time-averaged sum rate (bit/s) of max-gain scheduling with equal power.

    Each slot draws unit-mean exponential gains per user and subcarrier,
    gives each subcarrier to the strongest user (smallest index on ties) and
    only then applies that user's path loss.
    """
    if slots < 1:
        raise ValueError("slots must be positive")
    N = params.n_subcarriers
    M = pop.n_users
    dist = pop.per_user_distances()
    coef = params.power / (pathloss_linear(dist, params.pathloss_exp) * params.noise_power)
    coef = np.ascontiguousarray(coef, dtype=np.float64)
    total = 0.0
    done = 0
    while done < slots:
        n = min(batch, slots - done)
        gains = rng.standard_exponential((n, N, M))
        total += kernels.select_rates(gains, coef)
        done += n
    return params.bandwidth / N * total / slots
