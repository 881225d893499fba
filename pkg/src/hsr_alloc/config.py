"""Plain ``key = value`` run configuration.

Blank lines and ``#`` comments are ignored. Lists are comma separated.
Every key has a default; unknown keys are rejected.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from .channel import DEFAULT_SIGMA, TABLE_DELAYS, TABLE_POWERS, DelayProfile
from .ici import IciSpec
from .scenario import SystemParams, UserPopulation, default_population


class ConfigError(ValueError):
    pass


def _parse_bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_int(text):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        f = float(text)
        if not f.is_integer():
            raise ValueError(f"expected an integer, got {text!r}") from None
        return int(f)


def _float_list(text):
    return tuple(float(t) for t in text.split(",") if t.strip())


def _int_list(text):
    return tuple(_parse_int(t) for t in text.split(",") if t.strip())


_PARAM_TYPES = {
    f.name: (_parse_int if f.type in ("int", int) else float)
    for f in dataclasses.fields(SystemParams)
}

_EXTRA_TYPES = {
    "group_distances": _float_list,
    "group_counts": _int_list,
    "tap_delays": _float_list,
    "tap_powers": _float_list,
    "delay_spread": float,
    "ici_window": _parse_int,
    "ici_use_approx": _parse_bool,
    "doppler_attenuation": _parse_bool,
    "with_ici": _parse_bool,
    "seed": _parse_int,
    "grid_resolution": float,
    "mc_trials": _parse_int,
    "mc_slots": _parse_int,
    "rate_target": float,
}

KNOWN_KEYS = tuple(_PARAM_TYPES) + tuple(_EXTRA_TYPES)


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams = field(default_factory=SystemParams)
    population: UserPopulation = field(default_factory=default_population)
    profile: DelayProfile = field(
        default_factory=lambda: DelayProfile(TABLE_DELAYS, TABLE_POWERS, DEFAULT_SIGMA))
    ici: IciSpec = field(default_factory=IciSpec)
    doppler_attenuation: bool = True
    with_ici: bool = True
    seed: int = 0
    grid_resolution: float = 1e-3
    mc_trials: int = 10_000
    mc_slots: int = 10_000
    rate_target: float | None = None   # bit/s; overrides rho * C_sum when set

    @property
    def rho(self) -> float:
        return self.params.rho

    def resolved(self) -> dict:
        """Flat key -> value view, in a fixed order, for provenance lines."""
        p = self.params
        out = {name: getattr(p, name) for name in _PARAM_TYPES}
        out.update(
            group_distances=self.population.distances,
            group_counts=self.population.counts,
            tap_delays=self.profile.delays,
            tap_powers=self.profile.powers,
            delay_spread=self.profile.sigma,
            ici_window=self.ici.window,
            ici_use_approx=self.ici.use_approx,
            doppler_attenuation=self.doppler_attenuation,
            with_ici=self.with_ici,
            seed=self.seed,
            grid_resolution=self.grid_resolution,
            mc_trials=self.mc_trials,
            mc_slots=self.mc_slots,
            rate_target=self.rate_target,
        )
        return out


def _format_value(v):
    if isinstance(v, tuple):
        return ",".join(_format_value(x) for x in v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def describe(cfg: RunConfig) -> str:
    return "; ".join(f"{k}={_format_value(v)}" for k, v in cfg.resolved().items())


def read_pairs(path) -> dict[str, str]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    pairs = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in pairs:
            raise ConfigError(f"{path}:{lineno}: duplicate key '{key}'")
        pairs[key] = value
    return pairs


def parse_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Build a validated ``RunConfig`` from an optional file plus overrides.

    Overrides win over file values. Values may be strings (parsed) or
    already-typed Python values.
    """
    raw: dict = {}
    if path is not None:
        raw.update(read_pairs(path))
    raw.update(overrides or {})

    values = {}
    for key, text in raw.items():
        if key not in _PARAM_TYPES and key not in _EXTRA_TYPES:
            raise ConfigError(f"unknown config key '{key}'")
        parser = _PARAM_TYPES.get(key) or _EXTRA_TYPES[key]
        try:
            values[key] = parser(text) if isinstance(text, str) else _coerce(parser, text)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for '{key}': {exc}") from None

    param_kw = {k: v for k, v in values.items() if k in _PARAM_TYPES}
    try:
        params = SystemParams(**param_kw)
    except ValueError as exc:
        raise ConfigError(f"invalid system parameters: {exc}") from None

    try:
        if "group_distances" in values or "group_counts" in values:
            if "group_distances" not in values or "group_counts" not in values:
                raise ValueError("group_distances and group_counts must be given together")
            population = UserPopulation(values["group_distances"], values["group_counts"])
        else:
            population = default_population(params)
        population.check_against(params)
    except ValueError as exc:
        raise ConfigError(f"invalid user population (group_distances/group_counts): {exc}") from None

    try:
        profile = DelayProfile(
            values.get("tap_delays", TABLE_DELAYS),
            values.get("tap_powers", TABLE_POWERS),
            values.get("delay_spread", DEFAULT_SIGMA),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid delay profile (tap_delays/tap_powers/delay_spread): {exc}") from None
    if profile.total_power <= 0:
        raise ConfigError("invalid delay profile (tap_powers): all powers are zero")

    try:
        ici = IciSpec(values.get("ici_window", 5), values.get("ici_use_approx", True))
    except ValueError as exc:
        raise ConfigError(f"invalid ici_window: {exc}") from None

    res = values.get("grid_resolution", 1e-3)
    if not 0.0 < res <= 0.1:
        raise ConfigError(f"grid_resolution must lie in (0, 0.1], got {res}")
    for key in ("mc_trials", "mc_slots"):
        if key in values and values[key] < 1:
            raise ConfigError(f"{key} must be positive")
    rate_target = values.get("rate_target")
    if rate_target is not None and rate_target < 0:
        raise ConfigError("rate_target must be nonnegative")

    return RunConfig(
        params=params,
        population=population,
        profile=profile,
        ici=ici,
        doppler_attenuation=values.get("doppler_attenuation", True),
        with_ici=values.get("with_ici", True),
        seed=values.get("seed", 0),
        grid_resolution=res,
        mc_trials=values.get("mc_trials", 10_000),
        mc_slots=values.get("mc_slots", 10_000),
        rate_target=rate_target,
    )


def _coerce(parser, value):
    if parser in (_float_list, _int_list):
        conv = float if parser is _float_list else int
        return tuple(conv(v) for v in value)
    if parser is _parse_bool:
        if not isinstance(value, bool):
            raise TypeError(f"expected a boolean, got {value!r}")
        return value
    if parser is _parse_int:
        if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
            raise TypeError(f"expected an integer, got {value!r}")
        return int(value)
    if isinstance(value, bool):
        raise TypeError(f"expected a number, got {value!r}")
    return float(value)
