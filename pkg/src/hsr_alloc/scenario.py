"""Configuration constants and the train trajectory through one cell."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SystemParams:
    """Scalar system constants. Defaults reproduce the reference scenario."""

    bandwidth: float = 5e6            # Hz
    n_subcarriers: int = 512
    power: float = 10.0               # W
    noise_density: float = 6.32e-16  # W/Hz
    carrier_freq: float = 3e9         # Hz
    velocity: float = 100.0           # m/s
    pathloss_exp: float = 3.0
    cell_radius: float = 5000.0       # m
    vertical_dist: float = 1000.0     # m
    n_users: int = 50
    sched_period: float = 1.0         # s
    slot_duration: float = 1e-3       # s, inert
    rho: float = 0.5
    beta_step: float = 1e-3
    lightspeed: float = 3e8           # m/s
    cp_duration: float = 12.8e-6      # s, inert

    def __post_init__(self):
        positive = (
            "bandwidth", "n_subcarriers", "power", "noise_density", "carrier_freq",
            "velocity", "pathloss_exp", "cell_radius", "vertical_dist", "n_users",
            "sched_period", "slot_duration", "lightspeed", "cp_duration",
        )
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.vertical_dist >= self.cell_radius:
            raise ValueError(
                f"vertical_dist ({self.vertical_dist}) must be smaller than "
                f"cell_radius ({self.cell_radius}); the railway misses the cell"
            )
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [0, 1], got {self.rho}")
        if not 0.0 < self.beta_step < 1.0:
            raise ValueError(f"beta_step must lie in (0, 1), got {self.beta_step}")

    @property
    def symbol_duration(self) -> float:
        """Useful OFDM symbol length T = N / B."""
        return self.n_subcarriers / self.bandwidth

    @property
    def noise_power(self) -> float:
        """Total in-band noise power N0 * B."""
        return self.noise_density * self.bandwidth

    @property
    def max_doppler(self) -> float:
        return self.velocity * self.carrier_freq / self.lightspeed


@dataclass(frozen=True)
class UserPopulation:
    """Local users grouped by distance to the base station."""

    distances: tuple[float, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.distances) != len(self.counts) or not self.distances:
            raise ValueError("distances and counts must be non-empty and equally long")
        if any(c <= 0 for c in self.counts):
            raise ValueError("group counts must be positive")
        if any(d <= 0 for d in self.distances):
            raise ValueError("group distances must be positive")

    @property
    def n_users(self) -> int:
        return int(sum(self.counts))

    def check_against(self, params: SystemParams) -> None:
        if self.n_users != params.n_users:
            raise ValueError(
                f"group counts sum to {self.n_users} but n_users is {params.n_users}"
            )
        if max(self.distances) > params.cell_radius:
            raise ValueError("a user group lies outside the cell radius")

    def per_user_distances(self) -> np.ndarray:
        return np.repeat(np.asarray(self.distances, float), self.counts)


def default_population(params: SystemParams | None = None) -> UserPopulation:
    """Five equally sized groups at 100 m ... cell edge."""
    params = params or SystemParams()
    n_groups = 5
    if params.n_users % n_groups:
        raise ValueError("default population needs n_users divisible by 5")
    distances = tuple(float(d) for d in np.linspace(100.0, params.cell_radius, n_groups))
    return UserPopulation(distances, (params.n_users // n_groups,) * n_groups)


def pathloss_linear(d, alpha):
    """Distance-power path loss d**alpha (0 dB at 1 m)."""
    d_arr = np.asarray(d, dtype=float)
    if np.any(d_arr <= 0):
        raise ValueError("distance must be positive")
    out = d_arr ** alpha
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Period:
    index: int
    time: float          # s, period start relative to closest approach
    mr_distance: float   # m
    pathloss: float      # linear
    doppler: float       # Hz, signed


@dataclass(frozen=True)
class Trajectory:
    chord: float         # m, length of railway inside the cell
    dwell_time: float
    half_periods: int
    periods: tuple[Period, ...] = field(repr=False)

    def __len__(self):
        return len(self.periods)

    def __iter__(self):
        return iter(self.periods)

    def period(self, index: int) -> Period:
        return self.periods[index + self.half_periods]

    @property
    def indices(self) -> np.ndarray:
        return np.array([p.index for p in self.periods])

    @property
    def dopplers(self) -> np.ndarray:
        return np.array([p.doppler for p in self.periods])

    @property
    def pathlosses(self) -> np.ndarray:
        return np.array([p.pathloss for p in self.periods])


def doppler_shift(t, params: SystemParams):
    """Radial Doppler of the train at time t (s) relative to closest approach."""
    x = params.velocity * np.asarray(t, dtype=float)
    d = np.hypot(params.vertical_dist, x)
    out = params.max_doppler * x / d
    return float(out) if out.ndim == 0 else out


def derive_trajectory(params: SystemParams) -> Trajectory:
    """Split the dwell time into 2I+1 scheduling periods centred on closest approach."""
    if params.vertical_dist >= params.cell_radius:
        raise ValueError("vertical distance must be smaller than the cell radius")
    chord = 2.0 * math.sqrt(params.cell_radius**2 - params.vertical_dist**2)
    dwell = chord / params.velocity
    half_periods = math.ceil(dwell / (2.0 * params.sched_period))

    periods = []
    for i in range(-half_periods, half_periods + 1):
        t = i * params.sched_period
        # built from |i| so that the trajectory is exactly symmetric
        x = params.velocity * abs(i) * params.sched_period
        d0 = math.hypot(params.vertical_dist, x)
        fd = math.copysign(params.max_doppler * x / d0, i) if i else 0.0
        periods.append(Period(i, t, d0, d0**params.pathloss_exp, fd))
    return Trajectory(chord, dwell, half_periods, tuple(periods))
