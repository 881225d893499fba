"""Whole-pass computations shared by the CLI and the acceptance suite."""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .capacity import RateTarget, SnrFactors, c_sum, snr_factors
from .config import RunConfig
from .optimizer import (
    CPSA_VARIANTS, Allocation, ConstraintCurve, GapReport, Infeasible, bounds_and_gap,
    constraint_curve, cpsa, opsa,
)
from .scenario import Trajectory, derive_trajectory


class Study:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.params = cfg.params

    @cached_property
    def trajectory(self) -> Trajectory:
        return derive_trajectory(self.params)

    @cached_property
    def factors(self) -> list[SnrFactors]:
        return [
            snr_factors(p, self.params, self.cfg.population, self.cfg.ici,
                        self.cfg.doppler_attenuation)
            for p in self.trajectory
        ]

    @cached_property
    def target(self) -> RateTarget:
        base = c_sum(self.params, self.cfg.population, self.factors[0])
        if self.cfg.rate_target is None:
            return base
        rho = self.cfg.rate_target / base.c_sum if base.c_sum > 0 else float("inf")
        return RateTarget(base.c_sum, rho, self.cfg.rate_target)

    @cached_property
    def curve(self) -> ConstraintCurve:
        return constraint_curve(self.factors[0], self.target.r_th, self.params.beta_step)

    def check_feasible(self):
        if not self.curve.feasible.any():
            raise Infeasible(
                f"rate target {self.target.r_th:.6g} bit/s exceeds C_sum {self.target.c_sum:.6g} bit/s"
            )

    def sweep(self, with_ici: bool | None = None) -> list[Allocation]:
        with_ici = self.cfg.with_ici if with_ici is None else with_ici
        self.check_feasible()
        return [
            opsa(p, f, self.target.r_th, self.params, with_ici, self.curve)
            for p, f in zip(self.trajectory, self.factors)
        ]

    def cpsa(self, variant: str, with_ici: bool | None = None) -> list[Allocation]:
        with_ici = self.cfg.with_ici if with_ici is None else with_ici
        self.check_feasible()
        return cpsa(variant, self.trajectory, self.factors, self.target.r_th, self.params,
                    with_ici, self.curve)

    def cpsa_all(self, with_ici: bool | None = None) -> dict[str, list[Allocation]]:
        return {v: self.cpsa(v, with_ici) for v in CPSA_VARIANTS}

    def gaps(self) -> list[GapReport]:
        self.check_feasible()
        return [
            bounds_and_gap(p, f, self.target.r_th, self.params, self.curve)
            for p, f in zip(self.trajectory, self.factors)
        ]

    def column(self, allocations, name) -> np.ndarray:
        return np.array([getattr(a, name) for a in allocations])
