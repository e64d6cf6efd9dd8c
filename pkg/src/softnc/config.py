"""Experiment configuration: flat ``key = value`` files plus overrides."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .core import LINK_ABSENT
from .destination import RELAY_MODES

MIN_ERROR_EVENTS_FLOOR = 50


class ConfigError(ValueError):
    pass


def parse_db(text: str) -> float:
    t = text.strip().lower()
    if t in ("-inf", "absent", "none"):
        return LINK_ABSENT
    try:
        value = float(t)
    except ValueError:
        raise ConfigError(f"not an SNR value: {text!r}") from None
    if math.isnan(value):
        raise ConfigError("SNR must not be NaN")
    return value


def parse_db_list(text: str) -> tuple[float, ...]:
    """Comma-separated dB values, or an inclusive range ``start:stop:step``."""
    text = text.strip()
    if not text:
        return ()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"range must be start:stop:step, got {text!r}")
        start, stop, step = (parse_db(p) for p in parts)
        if not all(math.isfinite(v) for v in (start, stop, step)) or step <= 0:
            raise ConfigError(f"invalid range {text!r}")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(float(round(start + i * step, 10)) for i in range(max(n, 0)))
    return tuple(parse_db(p) for p in text.split(",") if p.strip())


@dataclass(frozen=True)
class ExperimentConfig:
    frame_length: int = 1024
    snr_sr_db: float = 5.0
    snr_sd_grid: tuple = (-4.0, -3.0, -2.0, -1.0, 0.0)
    snr_rd_list: tuple = (LINK_ABSENT, 0.0, 5.0, 10.0)
    max_iter: int = 10
    relay_obs_mode: str = "raw"
    seed: int = 0
    min_error_events: int = 100
    max_frames: int = 20_000
    # EXIT analysis
    exit_snr_r_list: tuple = (LINK_ABSENT, -5.0, 0.0, 1.0, 5.0, 20.0)
    exit_snr_sd_list: tuple = (-5.0, 0.0)
    trajectory_snr_sd: float = -5.0
    trajectory_snr_r: float = 1.0
    exit_samples: int = 200_000
    exit_grid_step: float = 0.05
    trajectory_frames: int = 10

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.frame_length < 1:
            raise ConfigError("frame_length must be >= 1")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1")
        if self.max_frames < 1:
            raise ConfigError("max_frames must be >= 1")
        if self.min_error_events < MIN_ERROR_EVENTS_FLOOR:
            raise ConfigError(f"min_error_events must be >= {MIN_ERROR_EVENTS_FLOOR}")
        if self.relay_obs_mode not in RELAY_MODES:
            raise ConfigError(f"relay_obs_mode must be one of {RELAY_MODES}")
        if self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        if self.exit_samples < 1:
            raise ConfigError("exit_samples must be >= 1")
        if not 0 < self.exit_grid_step <= 1:
            raise ConfigError("exit_grid_step must lie in (0, 1]")
        if self.trajectory_frames < 0:
            raise ConfigError("trajectory_frames must be >= 0")
        for v in (self.snr_sr_db, self.trajectory_snr_sd, self.trajectory_snr_r,
                  *self.snr_sd_grid, *self.snr_rd_list, *self.exit_snr_r_list, *self.exit_snr_sd_list):
            if math.isnan(v):
                raise ConfigError("SNR values must not be NaN")

    @property
    def exit_grid(self) -> np.ndarray:
        n = int(round(1.0 / self.exit_grid_step))
        return np.linspace(0.0, 1.0, n + 1)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


_INT_KEYS = {"frame_length", "max_iter", "seed", "min_error_events", "max_frames", "exit_samples",
             "trajectory_frames"}
_DB_KEYS = {"snr_sr_db", "trajectory_snr_sd", "trajectory_snr_r"}
_LIST_KEYS = {"snr_sd_grid", "snr_rd_list", "exit_snr_r_list", "exit_snr_sd_list"}
_FLOAT_KEYS = {"exit_grid_step"}
_STR_KEYS = {"relay_obs_mode"}


def parse_value(key: str, text: str):
    try:
        if key in _INT_KEYS:
            return int(text)
        if key in _DB_KEYS:
            return parse_db(text)
        if key in _LIST_KEYS:
            return parse_db_list(text)
        if key in _FLOAT_KEYS:
            return float(text)
        if key in _STR_KEYS:
            return text.strip()
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {text!r} ({exc})") from None
    raise ConfigError(f"unknown config key {key!r}")


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key] = parse_value(key, value)
    return values


def load_config(path=None, **overrides) -> ExperimentConfig:
    values = {}
    if path is not None:
        with open(path) as fh:
            values.update(parse_config_text(fh.read()))
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def format_config(config: ExperimentConfig) -> str:
    lines = []
    for f in dataclasses.fields(config):
        v = getattr(config, f.name)
        if isinstance(v, tuple):
            v = ",".join(_fmt(x) for x in v)
        elif isinstance(v, float):
            v = _fmt(v)
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return "-inf" if x == LINK_ABSENT else repr(float(x))
