"""Inter-carrier interference coefficients under two-path Doppler.

``coeff`` functions return E|H(n, p)|^2 for index difference ``k = n - p``.
The literal double-cosine sum is kept as an in-package oracle for the closed
forms; it is evaluated in extended precision because the off-diagonal
coefficients are the small remainder of O(1/N) terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .scenario import Period, SystemParams

_SINGULAR_TOL = 1e-12
_PI_LD = np.longdouble("3.14159265358979323846264338327950288")


def _fdt(fd, T):
    return np.asarray(fd, dtype=float) * T


def ici_coeff_sum(k, fd, T, N):
    """Literal finite-sum form of E|H(n,p)|^2 (oracle; long double)."""
    k = np.asarray(k)
    if np.any(np.abs(k) >= N):
        raise ValueError("|k| must be smaller than N")
    ld = np.longdouble
    pi = _PI_LD
    x = ld(fd) * ld(T)
    m = np.arange(1, N)
    # (k m) mod N is exact in integers; keeps every cosine argument below ~2 pi
    km = (np.asarray(k, dtype=np.int64)[..., None] * m) % N
    m = m.astype(ld)
    a = 2 * pi / N * (x * m + km.astype(ld))
    b = 2 * pi / N * (x * m - km.astype(ld))
    terms = (ld(N) - m) / 2 * (np.cos(a) + np.cos(b))
    out = ld(1) / N + ld(2) / (ld(N) * N) * terms.sum(axis=-1)
    out = out.astype(float)
    return float(out) if out.ndim == 0 else out


def _guarded_sin(half_angle):
    """sin(x) plus a mask of removable singularities (x = 0 mod pi)."""
    s = np.sin(half_angle)
    small = np.abs(s) < _SINGULAR_TOL
    return small, np.where(small, 1.0, s)


def ici_coeff_exact(k, fd, T, N):
    """Closed trigonometric form of the ICI coefficient.

    Uses sin^2(N A / 2) = sin^2(pi fD T) (the k-dependent part is a multiple
    of pi), so exact zeros at fD = 0 are reproduced exactly.
    """
    k = np.asarray(k, dtype=float)
    x = _fdt(fd, T)
    num = np.sin(np.pi * x) ** 2
    out = 0.0
    for sign in (1.0, -1.0):
        half = np.pi * (x + sign * k) / N
        small, s = _guarded_sin(half)
        out = out + np.where(small, float(N) ** 2, num / (s * s))
    out = out / (2.0 * N * N)
    out = np.asarray(out)
    return float(out) if out.ndim == 0 else out


def ici_coeff_approx(k, fd, T, N):
    """Small-Doppler approximation (1/N^2) sin^2(pi fD T) / sin^2(pi k / N)."""
    k = np.asarray(k)
    if np.any(k == 0):
        raise ValueError("the approximation only covers off-diagonal terms (k != 0)")
    x = _fdt(fd, T)
    if np.any(np.abs(x) >= 0.2):
        raise ValueError(f"approximation requires fD*T < 0.2, got {float(np.max(np.abs(x)))}")
    out = np.sin(np.pi * x) ** 2 / (N * N * np.sin(np.pi * k / N) ** 2)
    return float(out) if np.ndim(out) == 0 else out


def window_tail_fraction(fd, T, N, window=5):
    """Share of off-diagonal ICI power lying beyond ``window`` index steps."""
    k = np.arange(1, N)
    c = ici_coeff_exact(k, fd, T, N)
    dist = np.minimum(k, N - k)  # k and N-k are the same neighbour distance mod N
    total = c.sum()
    if total == 0:
        return 0.0
    return float(c[dist > window].sum() / total)


@dataclass(frozen=True)
class IciSpec:
    window: int = 5
    use_approx: bool = True

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be at least 1")

    def coeff_table(self, fd, T, N) -> dict[int, float]:
        ks = [k for k in range(-self.window, self.window + 1) if k != 0]
        fn = ici_coeff_approx if self.use_approx else ici_coeff_exact
        return {k: float(fn(k, fd, T, N)) for k in ks}


@dataclass(frozen=True)
class IciPower:
    gamma_ici0: float
    # aggregate ICI over the MR band at full power (eta = 1); scale by eta
    p_ici_watts: float
    table: dict = field(default_factory=dict, repr=False, compare=False)


def gamma_ici0(period: Period, params: SystemParams, spec: IciSpec = IciSpec(),
               beta: float | None = None) -> IciPower:
    """Normalised in-band ICI factor of one scheduling period.

    Every MR subcarrier is credited with the full two-sided window, so the
    factor does not depend on the band share. Passing ``beta`` checks that the
    band holds at least ``window`` subcarriers.
    """
    N = params.n_subcarriers
    if beta is not None:
        if not 0.0 < beta <= 1.0:
            raise ValueError("beta must lie in (0, 1]")
        if spec.window > beta * N:
            raise ValueError(
                f"window {spec.window} exceeds the {beta * N:g} subcarriers of the MR band"
            )
    table = spec.coeff_table(period.doppler, params.symbol_duration, N)
    coeff_sum = sum(table.values())
    g = params.power * coeff_sum / (period.pathloss * params.noise_power)
    return IciPower(g, g * params.noise_power, table)


def cross_band_ici(period: Period, params: SystemParams, beta: float, eta: float,
                   p: int | None = None) -> float:
    """Diagnostic: ICI power (W) leaked into MR subcarrier ``p`` from the local-user band.

    The MR occupies subcarriers [0, beta N); users the rest. Not used by the
    optimiser.
    """
    N = params.n_subcarriers
    n_mr = int(round(beta * N))
    if not 0 < n_mr < N:
        return 0.0
    p = n_mr // 2 if p is None else p
    users = np.arange(n_mr, N)
    c = ici_coeff_exact(users - p, period.doppler, params.symbol_duration, N)
    per_sub = (1.0 - eta) * params.power / (N - n_mr)
    return float(per_sub * c.sum() / period.pathloss)
