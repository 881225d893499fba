"""Per-period power/subcarrier split: OPSA sweep, grid oracle, constant baselines."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .capacity import SnrFactors, g1, g2, user_rule
from .scenario import Period, SystemParams, Trajectory

BISECT_REL_TOL = 1e-6
TIE_REL_TOL = 1e-12


class Infeasible(ValueError):
    """The local-user rate target cannot be met."""


@dataclass(frozen=True)
class Allocation:
    period_i: int
    beta: float
    eta: float
    c_mr: float
    c_users: float
    feasible: bool


@dataclass(frozen=True)
class GapReport:
    period_i: int
    c_lower: float
    c_upper: float
    gap: float


def beta_lattice(step: float) -> np.ndarray:
    n = int(round(1.0 / step))
    if n < 1 or abs(n * step - 1.0) > 1e-9:
        raise ValueError(f"beta step {step} must divide 1")
    return np.arange(n + 1) / n


def full_rate(factors: SnrFactors) -> float:
    """Local-user sum rate with every resource, i.e. g2(0, 0)."""
    return float(g2(0.0, 0.0, factors))


def default_tol(factors: SnrFactors) -> float:
    return BISECT_REL_TOL * full_rate(factors)


def solve_eta(beta: float, factors: SnrFactors, r_th: float, tol: float | None = None) -> float:
    """Largest MR power share keeping the users at ``r_th`` (bisection on eta).

    Raises ``Infeasible`` when even eta = 0 leaves the users short.
    """
    if tol is None:
        tol = default_tol(factors)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must lie in [0, 1]")
    coef, weight, scale = user_rule(factors)
    eta, ok = kernels.bisect_eta(np.array([beta]), coef, weight, scale, r_th, tol)
    if not ok[0]:
        raise Infeasible(f"rate target {r_th:.6g} bit/s unreachable at beta={beta}")
    return float(eta[0])


@dataclass(frozen=True)
class ConstraintCurve:
    """eta*(beta) on the beta lattice for one rate target."""

    betas: np.ndarray
    etas: np.ndarray
    feasible: np.ndarray
    r_th: float
    tol: float


def constraint_curve(factors: SnrFactors, r_th: float, beta_step: float,
                     tol: float | None = None) -> ConstraintCurve:
    """Run ``solve_eta`` at every lattice beta.

    The user-side statistics do not depend on the scheduling period, so one
    curve serves a whole trajectory.
    """
    if tol is None:
        tol = default_tol(factors)
    betas = beta_lattice(beta_step)
    coef, weight, scale = user_rule(factors)
    etas, ok = kernels.bisect_eta(betas, coef, weight, scale, r_th, tol)
    return ConstraintCurve(betas, etas, ok, float(r_th), float(tol))


def opsa(period: Period, factors: SnrFactors, r_th: float, params: SystemParams,
         with_ici: bool = True, curve: ConstraintCurve | None = None) -> Allocation:
    """Sweep beta upward on the lattice with eta pinned to the constraint; stop at
    the first decrease of the MR rate and keep the incumbent."""
    if curve is None:
        curve = constraint_curve(factors, r_th, params.beta_step)
    elif curve.r_th != r_th:
        raise ValueError("constraint curve was built for a different rate target")
    feas = np.flatnonzero(curve.feasible)
    if feas.size == 0:
        raise Infeasible(f"rate target {r_th:.6g} bit/s exceeds the users' full-resource rate")
    start = feas[0]
    # the sweep can only walk through the contiguous feasible run
    stop = start
    while stop + 1 < curve.betas.size and curve.feasible[stop + 1]:
        stop += 1
    betas = curve.betas[start:stop + 1]
    etas = curve.etas[start:stop + 1]
    values = g1(etas, betas, factors, with_ici)

    best = 0
    c_trm = values[0]
    for j in range(1, values.size):
        v = values[j]
        tie = TIE_REL_TOL * abs(c_trm)
        if v < c_trm - tie:
            break
        if v > c_trm + tie:
            best, c_trm = j, v
    beta, eta = float(betas[best]), float(etas[best])
    return Allocation(period.index, beta, eta, float(c_trm), float(g2(eta, beta, factors)), True)


def opsa_sweep(trajectory: Trajectory, factors: list[SnrFactors], r_th: float,
               params: SystemParams, with_ici: bool = True) -> list[Allocation]:
    curve = constraint_curve(factors[0], r_th, params.beta_step)
    return [opsa(p, f, r_th, params, with_ici, curve) for p, f in zip(trajectory, factors)]


@lru_cache(maxsize=8)
def _g2_grid(gamma_m, group_weights, n_users, bandwidth, n):
    f = SnrFactors(0.0, gamma_m, group_weights, 0.0, bandwidth, n_users)
    axis = np.arange(n + 1) / n
    eta, beta = np.meshgrid(axis, axis, indexing="ij")
    return g2(eta, beta, f)


def _grid_n(resolution):
    if not 0.0 < resolution <= 0.1:
        raise ValueError("resolution must lie in (0, 0.1]")
    return int(round(1.0 / resolution))


def grid_oracle(period: Period, factors: SnrFactors, r_th: float, resolution: float,
                with_ici: bool = True) -> Allocation:
    """Exhaustive scan of the (eta, beta) grid; best feasible point wins.

    Test-only reference for the sweep. Ties keep the smaller beta.
    """
    n = _grid_n(resolution)
    axis = np.arange(n + 1) / n
    users = _g2_grid(factors.gamma_m, factors.group_weights, factors.n_users,
                     factors.bandwidth, n)                       # [eta, beta]
    eta, beta = np.meshgrid(axis, axis, indexing="ij")
    mr = g1(eta, beta, factors, with_ici)
    mr = np.where(users >= r_th, mr, -np.inf)
    best_val = -np.inf
    best = None
    for jb in range(n + 1):  # ascending beta
        ie = int(np.argmax(mr[:, jb]))
        v = mr[ie, jb]
        if v > best_val + TIE_REL_TOL * abs(best_val if np.isfinite(best_val) else 0.0):
            best_val, best = v, (ie, jb)
    if best is None:
        raise Infeasible("no grid point meets the rate target")
    ie, jb = best
    return Allocation(period.index, float(axis[jb]), float(axis[ie]), float(best_val),
                      float(users[ie, jb]), True)


def grid_lipschitz(factors: SnrFactors, resolution: float, with_ici: bool = True) -> float:
    """Largest objective change between neighbouring grid points (per cell)."""
    n = _grid_n(resolution)
    axis = np.arange(n + 1) / n
    eta, beta = np.meshgrid(axis, axis, indexing="ij")
    mr = g1(eta, beta, factors, with_ici)
    return float(max(np.abs(np.diff(mr, axis=0)).max(), np.abs(np.diff(mr, axis=1)).max()))


CPSA_VARIANTS = ("PL", "BL", "I")


def cpsa_anchor(variant: str, trajectory: Trajectory) -> int:
    I = trajectory.half_periods
    try:
        return {"PL": -I, "BL": 0, "I": I // 2}[variant]
    except KeyError:
        raise ValueError(f"unknown CPSA variant {variant!r}") from None


def cpsa(variant: str, trajectory: Trajectory, factors: list[SnrFactors], r_th: float,
         params: SystemParams, with_ici: bool = True,
         curve: ConstraintCurve | None = None) -> list[Allocation]:
    """Optimise once at the anchor period, then hold (beta, eta) for the whole pass."""
    anchor = cpsa_anchor(variant, trajectory)
    pos = anchor + trajectory.half_periods
    if curve is None:
        curve = constraint_curve(factors[pos], r_th, params.beta_step)
    try:
        fixed = opsa(trajectory.periods[pos], factors[pos], r_th, params, with_ici, curve)
    except Infeasible as exc:
        raise Infeasible(f"CPSA-{variant} anchor period {anchor} infeasible") from exc
    out = []
    for p, f in zip(trajectory, factors):
        c_users = float(g2(fixed.eta, fixed.beta, f))
        out.append(Allocation(p.index, fixed.beta, fixed.eta,
                              float(g1(fixed.eta, fixed.beta, f, with_ici)),
                              c_users, c_users >= r_th - curve.tol))
    return out


def bounds_and_gap(period: Period, factors: SnrFactors, r_th: float, params: SystemParams,
                   curve: ConstraintCurve | None = None) -> GapReport:
    """ICI-as-noise (lower) versus ICI-free (upper) OPSA rate and their normalised gap."""
    if curve is None:
        curve = constraint_curve(factors, r_th, params.beta_step)
    lower = opsa(period, factors, r_th, params, True, curve).c_mr
    upper = opsa(period, factors, r_th, params, False, curve).c_mr
    gap = 0.0 if upper <= 0 else (upper - lower) / upper
    return GapReport(period.index, lower, upper, gap)
