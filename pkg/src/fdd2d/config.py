"""Scenario configuration: Table-style parameter set, file parsing, overrides.

Config files are flat `key = value` text (# starts a comment).  CLI
--set overrides use the same keys.  The sweep grid is a comma-separated
list, e.g. `grid = 0.05,0.1,0.15`.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .channel import ChannelEnv, db_to_linear, dbm_to_watts, noise_power_w


class ConfigError(Exception):
    """Invalid configuration file, key, or value."""


@dataclass(frozen=True)
class ScenarioConfig:
    """All simulation parameters for one scenario run."""

    n: int = 500
    h: int = 1
    m: int = 1000
    gamma_r: float = 1.6
    beta_db: float = -70.0
    tau: int = 1
    W_hz: float = 1.2e6
    alpha: float = 2.6
    pt_dbm: float = 23.0
    a_km: float = 1.0
    shadow_db: float = 4.0
    file_min_mb: float = 5.0
    file_max_mb: float = 50.0
    drops: int = 1000
    seed: int | None = None
    fading_samples: int = 200
    noise_dbm_hz: float = -174.0
    l_km: float = 0.2
    sweep: str | None = None
    grid: tuple | None = None

    def channel_env(self) -> ChannelEnv:
        return ChannelEnv(
            pt_w=dbm_to_watts(self.pt_dbm),
            sigma2_w=noise_power_w(self.noise_dbm_hz, self.W_hz),
            alpha=self.alpha,
            beta=db_to_linear(self.beta_db),
            shadow_sigma_db=self.shadow_db,
            bandwidth_hz=self.W_hz,
        )

    def sweep_values(self) -> tuple:
        if self.sweep is None:
            return (self.l_km,)
        return self.grid

    def at_sweep_point(self, value) -> "ScenarioConfig":
        """Materialize one sweep point into a concrete (l, n) configuration."""
        if self.sweep is None or self.sweep == "l_km":
            return dataclasses.replace(self, l_km=float(value))
        if self.sweep == "n":
            return dataclasses.replace(self, n=int(value))
        raise ConfigError(f"unknown sweep variable {self.sweep!r}")


_INT_KEYS = {"n", "h", "m", "tau", "drops", "seed", "fading_samples"}
_FLOAT_KEYS = {
    "gamma_r", "beta_db", "W_hz", "alpha", "pt_dbm", "a_km", "shadow_db",
    "file_min_mb", "file_max_mb", "noise_dbm_hz", "l_km",
}
_STR_KEYS = {"sweep"}
KNOWN_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS | {"grid"}


def _coerce(key: str, raw: str):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key == "grid":
            values = tuple(float(v) for v in raw.split(",") if v.strip() != "")
            if not values:
                raise ValueError("empty grid")
            return values
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r} ({exc})") from None


def parse_overrides(pairs) -> dict:
    """Parse `key=value` strings (from --set flags) into typed values."""
    out = {}
    for pair in pairs:
        key, sep, raw = pair.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"override must look like key=value, got {pair!r}")
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        out[key] = _coerce(key, raw.strip())
    return out


def parse_config_file(path) -> dict:
    """Read a flat key=value config file into typed values."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(lines, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        key, sep, raw = text.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        out[key] = _coerce(key, raw.strip())
    return out


def apply_settings(base: ScenarioConfig, settings: dict) -> ScenarioConfig:
    return dataclasses.replace(base, **settings)


def validate(config: ScenarioConfig, require_seed: bool = True) -> ScenarioConfig:
    """Sanity-check a configuration; raises ConfigError on violations."""
    c = config
    if c.m < 1:
        raise ConfigError("m must be >= 1")
    if c.n < 0:
        raise ConfigError("n must be >= 0")
    if c.h < 1 or c.tau < 1 or c.drops < 1 or c.fading_samples < 1:
        raise ConfigError("h, tau, drops and fading_samples must be >= 1")
    if c.gamma_r < 0:
        raise ConfigError("gamma_r must be >= 0")
    if c.W_hz <= 0 or c.a_km <= 0:
        raise ConfigError("W_hz and a_km must be > 0")
    if not 0 < c.file_min_mb <= c.file_max_mb:
        raise ConfigError("file size range must satisfy 0 < min <= max")
    if c.shadow_db < 0:
        raise ConfigError("shadow_db must be >= 0")
    if c.sweep is not None:
        if c.sweep not in ("l_km", "n"):
            raise ConfigError("sweep must be one of: l_km, n")
        if not c.grid:
            raise ConfigError("sweep requires a nonempty grid")
    side = c.a_km * math.sqrt(2.0)
    for l in ([v for v in (c.grid or ()) ] if c.sweep == "l_km" else [c.l_km]):
        if not 0 < l <= side * (1 + 1e-9):
            raise ConfigError(f"l={l} must lie in (0, cell side {side:.6f}]")
    if require_seed and c.seed is None:
        raise ConfigError("seed is mandatory (config key `seed` or --seed)")
    return c
