"""Small-scale fading statistics: delay profile, two-path Doppler correlation,
and the per-subcarrier gain laws consumed by the capacity expectations."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Reference six-tap exponential profile (delays in seconds).
TABLE_DELAYS = (0.0, 1e-6, 2e-6, 3e-6, 4e-6, 5e-6)
TABLE_POWERS = (1.000, 0.368, 0.135, 0.050, 0.018, 0.007)
DEFAULT_SIGMA = 1e-6


@dataclass(frozen=True)
class DelayProfile:
    delays: tuple[float, ...]
    powers: tuple[float, ...]
    sigma: float = DEFAULT_SIGMA

    def __post_init__(self):
        if not self.delays or len(self.delays) != len(self.powers):
            raise ValueError("delay profile needs at least one tap and matching powers")
        if any(b < a for a, b in zip(self.delays, self.delays[1:])):
            raise ValueError("tap delays must be nondecreasing")
        if any(p < 0 for p in self.powers):
            raise ValueError("tap powers must be nonnegative")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")

    @property
    def n_taps(self) -> int:
        return len(self.delays)

    @property
    def total_power(self) -> float:
        return math.fsum(self.powers)


def table_profile() -> DelayProfile:
    return DelayProfile(TABLE_DELAYS, TABLE_POWERS, DEFAULT_SIGMA)


def normalize_profile(raw: DelayProfile) -> DelayProfile:
    """Scale tap powers to unit total power; delays are untouched."""
    total = raw.total_power
    if total <= 0:
        raise ValueError("cannot normalize a profile whose powers are all zero")
    powers = tuple(p / total for p in raw.powers)
    return DelayProfile(raw.delays, powers, raw.sigma)


def time_autocorr(fd, dt):
    """Two-path Doppler autocorrelation cos(2 pi fD dt)."""
    return np.cos(2.0 * np.pi * np.asarray(fd) * np.asarray(dt))


def cross_covariance(sigma, df, dt, fd=0.0):
    """Time-frequency cross covariance of an exponential-profile channel with
    two-path Doppler. ``fd = 0`` gives the static (local user) case."""
    x = 2.0 * np.pi * sigma * np.asarray(df, dtype=float)
    freq = (1.0 + 1j * x) / (1.0 + x * x)
    return freq * time_autocorr(fd, dt)


def mr_diag_gain_mean(fd, T, N):
    """Mean diagonal DFT gain E|H(p,p)|^2 under two-path Doppler.

    Equals (1/N^2) sin^2(pi fD T) / sin^2(pi fD T / N), with the limit 1 at fD = 0.
    """
    x = np.pi * np.abs(np.asarray(fd, dtype=float)) * T
    small = np.abs(np.sin(x / N)) < 1e-12
    safe = np.where(small, 1.0, x)
    ratio = np.sin(safe) / (N * np.sin(safe / N))
    out = np.where(small, 1.0, ratio * ratio)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class FadingLaw:
    """Law of the per-subcarrier power gain |H(p,p)|^2.

    ``exp_unit``: exponential with mean ``mean``.
    ``max_of_M``: maximum of ``m_users`` unit-mean exponentials.
    """

    kind: str = "exp_unit"
    mean: float = 1.0
    m_users: int = 1

    def __post_init__(self):
        if self.kind not in ("exp_unit", "max_of_M"):
            raise ValueError(f"unknown fading law {self.kind!r}")
        if self.mean <= 0:
            raise ValueError("mean must be positive")
        if self.m_users < 1:
            raise ValueError("m_users must be at least 1")

    @classmethod
    def exponential(cls, mean=1.0):
        return cls("exp_unit", float(mean), 1)

    @classmethod
    def max_of(cls, m_users):
        return cls("max_of_M", 1.0, int(m_users))

    @property
    def support_hi(self) -> float:
        """Upper integration limit beyond which the tail mass is below e^-60."""
        if self.kind == "exp_unit":
            return 60.0 * self.mean
        return 60.0 + math.log(self.m_users)

    @property
    def support_lo(self) -> float:
        return 1e-9 * (self.mean if self.kind == "exp_unit" else 1.0)

    def expected(self) -> float:
        if self.kind == "exp_unit":
            return self.mean
        # E[max of M Exp(1)] is the M-th harmonic number
        return math.fsum(1.0 / k for k in range(1, self.m_users + 1))


def cdf_gain(law: FadingLaw, x):
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    if law.kind == "exp_unit":
        out = -np.expm1(-x / law.mean)
    else:
        out = (-np.expm1(-x)) ** law.m_users
    return float(out) if out.ndim == 0 else out


def pdf_gain(law: FadingLaw, x):
    x = np.asarray(x, dtype=float)
    if law.kind == "exp_unit":
        out = np.exp(-x / law.mean) / law.mean
    else:
        m = law.m_users
        out = m * (-np.expm1(-x)) ** (m - 1) * np.exp(-x)
    out = np.where(x < 0, 0.0, out)
    return float(out) if out.ndim == 0 else out


def sample_gain(law: FadingLaw, rng: np.random.Generator, size=None):
    """Draw gains from ``law`` by inverse transform."""
    u = rng.random(size)
    if law.kind == "exp_unit":
        return -law.mean * np.log1p(-u)
    # invert (1 - e^-x)^M = u
    return -np.log1p(-(u ** (1.0 / law.m_users)))
