"""Ergodic capacity expectations and the two sides of the per-period program.

All rates are in bit/s (``LOG_BASE``). Expectations E[log(1 + s X)] are taken
against the gain law with composite Gauss-Legendre panels on a log-spaced
axis. ``ergodic_log_capacity`` refines the panels per call; the optimiser hot
path uses a ``QuadratureRule`` frozen once per law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .channel import FadingLaw, mr_diag_gain_mean, pdf_gain
from .ici import IciSpec, gamma_ici0
from .scenario import Period, SystemParams, UserPopulation, pathloss_linear

LOG_BASE = 2.0
_LN_BASE = math.log(LOG_BASE)

_GL_ORDER = 16
_REL_TOL = 1e-9
_MAX_PANELS = 4096
_PRUNE = 1e-13
_S_CAP = 1e300
# SNR scales the frozen rules are calibrated over
_PROBE_S = np.logspace(-8, 10, 73)


class QuadratureError(RuntimeError):
    pass


def _panel_nodes(law: FadingLaw, n_panels: int):
    g, w = np.polynomial.legendre.leggauss(_GL_ORDER)
    edges = np.linspace(math.log(law.support_lo), math.log(law.support_hi), n_panels + 1)
    a, b = edges[:-1, None], edges[1:, None]
    u = ((b - a) / 2 * g + (a + b) / 2).ravel()
    wu = ((b - a) / 2 * w).ravel()
    x = np.exp(u)
    return x, wu * x * pdf_gain(law, x)


def _expect_nats(x, w, s):
    return np.log1p(np.multiply.outer(np.atleast_1d(s), x)) @ w


def ergodic_log_capacity(gamma, law: FadingLaw) -> float:
    """E[log2(1 + gamma X)] for X drawn from ``law``, refined by panel doubling."""
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    if gamma == 0:
        return 0.0
    n = 4
    x, w = _panel_nodes(law, n)
    prev = float(_expect_nats(x, w, gamma)[0])
    while n < _MAX_PANELS:
        n *= 2
        x, w = _panel_nodes(law, n)
        cur = float(_expect_nats(x, w, gamma)[0])
        if abs(cur - prev) <= _REL_TOL * abs(cur):
            return cur / _LN_BASE
        prev = cur
    raise QuadratureError(f"no convergence for gamma={gamma} under {law}")


@dataclass(frozen=True)
class QuadratureRule:
    """Fixed nodes/weights with sum(w * log1p(s * x)) ~= E[ln(1 + s X)]."""

    nodes: np.ndarray
    weights: np.ndarray
    n_panels: int

    def expect(self, s):
        """E[log2(1 + s X)] for an array of scales ``s``."""
        s = np.asarray(s, dtype=float)
        return kernels.expect_log1p(self.nodes, self.weights, s).reshape(s.shape) / _LN_BASE


@lru_cache(maxsize=64)
def frozen_rule(law: FadingLaw) -> QuadratureRule:
    """Panel count doubled until every probe scale changes < 1e-9, then pruned."""
    n = 4
    x, w = _panel_nodes(law, n)
    prev = _expect_nats(x, w, _PROBE_S)
    while True:
        if n >= _MAX_PANELS:
            raise QuadratureError(f"frozen rule for {law} did not converge")
        n *= 2
        x2, w2 = _panel_nodes(law, n)
        cur = _expect_nats(x2, w2, _PROBE_S)
        if np.all(np.abs(cur - prev) <= _REL_TOL * np.abs(cur)):
            break
        x, w, prev = x2, w2, cur
    x, w = x2, w2
    contrib = w * np.log1p(np.multiply.outer(_PROBE_S, x)) / cur[:, None]
    keep = contrib.max(axis=0) > _PRUNE
    return QuadratureRule(np.ascontiguousarray(x[keep]), np.ascontiguousarray(w[keep]), n)


def closed_form_log_capacity(gamma, law: FadingLaw, dps: int = 60) -> float:
    """Exponential-integral forms, evaluated with mpmath.

    exp law (mean mu): e^{1/(mu g)} E1(1/(mu g)) / ln 2.
    max of M: sum_k C(M,k) (-1)^{k+1} e^{k/g} E1(k/g) / ln 2; the alternating
    binomial sum cancels catastrophically, hence the working precision.
    """
    import mpmath as mp

    if gamma == 0:
        return 0.0
    with mp.workdps(dps):
        if law.kind == "exp_unit":
            z = 1 / (mp.mpf(law.mean) * mp.mpf(gamma))
            val = mp.exp(z) * mp.e1(z)
        else:
            g = mp.mpf(gamma)
            M = law.m_users
            val = mp.fsum(
                mp.binomial(M, k) * (-1) ** (k + 1) * mp.exp(k / g) * mp.e1(k / g)
                for k in range(1, M + 1)
            )
        return float(val / mp.log(LOG_BASE))


@dataclass(frozen=True)
class SnrFactors:
    """Per-period SNR factors of the MR and the (period-independent) user groups."""

    gamma0: float
    gamma_m: tuple[float, ...]
    group_weights: tuple[float, ...]   # count / M
    gamma_ici0: float
    bandwidth: float
    n_users: int

    def without_ici(self) -> "SnrFactors":
        return SnrFactors(self.gamma0, self.gamma_m, self.group_weights, 0.0,
                          self.bandwidth, self.n_users)


@dataclass(frozen=True)
class RateTarget:
    c_sum: float
    rho: float
    r_th: float


def snr_factors(period: Period, params: SystemParams, pop: UserPopulation,
                spec: IciSpec = IciSpec(), doppler_attenuation: bool = True) -> SnrFactors:
    mu = 1.0
    if doppler_attenuation:
        mu = mr_diag_gain_mean(period.doppler, params.symbol_duration, params.n_subcarriers)
    gamma0 = mu * params.power / (period.pathloss * params.noise_power)
    users = _user_only_factors(params, pop)
    g_ici = gamma_ici0(period, params, spec).gamma_ici0
    return SnrFactors(float(gamma0), users.gamma_m, users.group_weights, float(g_ici),
                      params.bandwidth, pop.n_users)


@lru_cache(maxsize=256)
def _user_rule(gamma_m, group_weights, n_users):
    """Merge the per-group expectations into one weighted node set."""
    rule = frozen_rule(FadingLaw.max_of(n_users))
    coef = np.concatenate([g * rule.nodes for g in gamma_m])
    weight = np.concatenate([wt * rule.weights for wt in group_weights])
    return np.ascontiguousarray(coef), np.ascontiguousarray(weight)


def user_rule(factors: SnrFactors):
    """(coef, weight, scale) with g2 = (1 - beta) * scale * sum(w log1p(s coef))."""
    coef, weight = _user_rule(factors.gamma_m, factors.group_weights, factors.n_users)
    return coef, weight, factors.bandwidth / _LN_BASE


def g1(eta, beta, factors: SnrFactors, with_ici: bool = True):
    """MR ergodic rate (bit/s) with power share ``eta`` and band share ``beta``."""
    eta = np.asarray(eta, dtype=float)
    beta = np.asarray(beta, dtype=float)
    eta, beta = np.broadcast_arrays(eta, beta)
    g_ici = factors.gamma_ici0 if with_ici else 0.0
    pos = beta > 0
    denom = g_ici * eta + np.where(pos, beta, 1.0)
    # subnormal beta can overflow s; the capped value keeps beta * E[...] -> 0
    with np.errstate(over="ignore"):
        s = np.minimum(np.where(pos, factors.gamma0 * eta / denom, 0.0), _S_CAP)
    rule = frozen_rule(FadingLaw.exponential(1.0))
    out = np.where(pos, beta * factors.bandwidth * rule.expect(s), 0.0)
    return float(out) if out.ndim == 0 else out


def g2(eta, beta, factors: SnrFactors):
    """Local-user sum rate (bit/s) left after the MR takes (eta, beta)."""
    eta = np.asarray(eta, dtype=float)
    beta = np.asarray(beta, dtype=float)
    eta, beta = np.broadcast_arrays(eta, beta)
    coef, weight, scale = user_rule(factors)
    open_ = beta < 1.0
    s = np.where(open_, (1.0 - eta) / np.where(open_, 1.0 - beta, 1.0), 0.0)
    val = kernels.expect_log1p(coef, weight, s).reshape(s.shape)
    out = np.where(open_, (1.0 - beta) * scale * val, 0.0)
    return float(out) if out.ndim == 0 else out


def c_sum(params: SystemParams, pop: UserPopulation, factors: SnrFactors | None = None) -> RateTarget:
    """Local-user sum capacity with every resource, and the threshold rho * C_sum.

    Evaluated through the same rule as ``g2`` so that g2(0, 0) == C_sum exactly.
    """
    if factors is None:
        factors = _user_only_factors(params, pop)
    total = float(g2(0.0, 0.0, factors))
    return RateTarget(total, params.rho, params.rho * total)


def c_sum_reference(params: SystemParams, pop: UserPopulation) -> float:
    """C_sum via per-group adaptive quadrature (independent of the frozen rule)."""
    law = FadingLaw.max_of(pop.n_users)
    noise = params.noise_power
    total = 0.0
    for d, count in zip(pop.distances, pop.counts):
        gamma = params.power / (pathloss_linear(d, params.pathloss_exp) * noise)
        total += count / pop.n_users * params.bandwidth * ergodic_log_capacity(gamma, law)
    return total


def _user_only_factors(params, pop):
    noise = params.noise_power
    gamma_m = tuple(
        float(params.power / (pathloss_linear(d, params.pathloss_exp) * noise))
        for d in pop.distances
    )
    weights = tuple(c / pop.n_users for c in pop.counts)
    return SnrFactors(0.0, gamma_m, weights, 0.0, params.bandwidth, pop.n_users)
