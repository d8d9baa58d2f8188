import logging
import os
from dataclasses import dataclass, fields
from typing import Any, Dict, Optional, Tuple

import yaml

from config import DEFAULT_NS_FINE, DEFAULT_WORKERS, OUTPUT_DIR
from .helpers import parse_float_list, parse_int_list

logger = logging.getLogger(__name__)

EXPERIMENTS = ("converge", "dimscale", "weak", "prob", "clow", "perturb", "trap", "separate", "lattice", "scd-check")


class ConfigError(ValueError):
    """An experiment configuration field is missing or invalid."""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    seed: int
    workers: int = DEFAULT_WORKERS
    out_dir: str = OUTPUT_DIR
    csv: Optional[str] = None
    json: Optional[str] = None
    T: float = 1.0
    trials: int = 200
    solver: str = "rmm"
    potential: str = "quadratic:u=1,L=4"
    ns: Tuple[int, ...] = (16, 32, 64, 128, 256)
    h: Tuple[float, ...] = (2 ** -3, 2 ** -4, 2 ** -5, 2 ** -6, 2 ** -7, 2 ** -8)
    d: Tuple[int, ...] = (1, 4, 16, 64)
    ell: float = 1.0
    L: float = 4.0
    u: float = 2.0
    u_r: Optional[float] = None
    u_list: Optional[Tuple[float, ...]] = None
    u_r_list: Optional[Tuple[float, ...]] = None
    cx: Tuple[float, ...] = (0.25,)
    cv: Tuple[float, ...] = (8.0,)
    xi: Optional[float] = None
    n: Tuple[int, ...] = (8,)
    ns_fine: int = DEFAULT_NS_FINE

    @property
    def csv_path(self) -> str:
        return self.csv or os.path.join(self.out_dir, f"{self.experiment}.csv")

    @property
    def json_path(self) -> str:
        return self.json or os.path.join(self.out_dir, f"{self.experiment}.json")

    @property
    def upper_curvature(self) -> float:
        return self.L if self.u_r is None else self.u_r

    @property
    def u_grid(self) -> Tuple[float, ...]:
        return self.u_list or (self.u,)

    @property
    def u_r_grid(self) -> Tuple[float, ...]:
        return self.u_r_list or (self.upper_curvature,)

    @property
    def bump_slope(self) -> float:
        """xi, defaulting to min(u - ell, u_R - u)."""
        if self.xi is not None:
            return self.xi
        return min(self.u - self.ell, self.upper_curvature - self.u)

    def params(self) -> Dict[str, Any]:
        """Echo of every field for the JSON summary."""
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = list(value) if isinstance(value, tuple) else value
        return out


# Applied before the config file and flags
EXPERIMENT_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "converge": {"trials": 2000},
    "dimscale": {"ns": (64,), "trials": 500},
    "weak": {},
    "prob": {"cx": (1.0,), "cv": (0.1,), "trials": 100000},
    "clow": {"cx": (0.02, 0.05, 0.08), "cv": (4.0, 8.0, 16.0), "u_list": (2.0, 2.5), "u_r_list": (3.0, 4.0),
             "trials": 4000, "ns_fine": 1024},
    "perturb": {"n": (8, 16, 32), "trials": 1000},
    # event-feasible thresholds, so paths actually reach the bumps and the crossing event fires
    "trap": {"cx": (0.02,), "trials": 1000},
    "separate": {"cx": (0.02,), "trials": 2000},
    "lattice": {"cx": (0.02,), "n": (4, 8), "trials": 200, "ns_fine": 1024},
    "scd-check": {"n": (12,)},
}

INT_LISTS = {"ns", "d", "n"}
FLOAT_LISTS = {"h", "cx", "cv", "u_list", "u_r_list"}
INTS = {"seed", "workers", "trials", "ns_fine"}
FLOATS = {"T", "ell", "L", "u", "u_r", "xi"}


def _coerce(key: str, value: Any) -> Any:
    if value is None:
        return None
    try:
        if key in INT_LISTS:
            return tuple(parse_int_list(value))
        if key in FLOAT_LISTS:
            return tuple(parse_float_list(value))
        if key in INTS:
            if isinstance(value, bool):
                raise ValueError(f"{value!r} is not an integer")
            if isinstance(value, int):
                return value
            if isinstance(value, str) and value.strip().lstrip("-").isdigit():
                return int(value)
            number = float(value)
            if number != int(number):
                raise ValueError(f"{value!r} is not an integer")
            return int(number)
        if key in FLOATS:
            return float(value)
    except (TypeError, ValueError, OverflowError) as e:
        raise ConfigError(f"invalid value for '{key}': {e}") from None
    return value


def load_config_file(path: str) -> Dict[str, Any]:
    try:
        with open(path, "r") as file:
            data = yaml.safe_load(file) or {}
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from None
    except yaml.YAMLError as e:
        raise ConfigError(f"config file {path} is not valid YAML: {e}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a mapping")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def _validate(cfg: ExperimentConfig):
    if cfg.experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment '{cfg.experiment}'")
    if cfg.workers < 1:
        raise ConfigError(f"'workers' must be >= 1, got {cfg.workers}")
    if cfg.trials < 1:
        raise ConfigError(f"'trials' must be >= 1, got {cfg.trials}")
    if not cfg.T > 0:
        raise ConfigError(f"'T' must be positive, got {cfg.T}")
    if cfg.ns_fine < 1:
        raise ConfigError(f"'ns_fine' must be >= 1, got {cfg.ns_fine}")
    if cfg.solver not in ("exact", "em", "rmm"):
        raise ConfigError(f"'solver' must be one of exact, em, rmm; got '{cfg.solver}'")
    for key in ("ns", "d", "n"):
        values = getattr(cfg, key)
        if not values:
            raise ConfigError(f"'{key}' must not be empty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigError(f"'{key}' must be strictly increasing, got {list(values)}")
        if min(values) < 1:
            raise ConfigError(f"'{key}' entries must be >= 1, got {list(values)}")
    for key in ("u_list", "u_r_list"):
        values = getattr(cfg, key)
        if values is None:
            continue
        if not values or min(values) <= 0 or any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigError(f"'{key}' must be positive and strictly increasing, got {list(values)}")
    if any(b >= a for a, b in zip(cfg.h, cfg.h[1:])) or min(cfg.h) <= 0:
        raise ConfigError(f"'h' must be positive and strictly decreasing, got {list(cfg.h)}")


def parse_config(experiment: str, flags: Optional[Dict[str, Any]] = None, path: Optional[str] = None) -> ExperimentConfig:
    """Merge a YAML file and command-line flags (flags win) into a validated config."""
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment '{experiment}'")
    known = {f.name for f in fields(ExperimentConfig)} - {"experiment"}
    merged: Dict[str, Any] = dict(EXPERIMENT_DEFAULTS[experiment])
    if path:
        data = load_config_file(path)
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
        merged.update(data)
    for key, value in (flags or {}).items():
        if key not in known:
            raise ConfigError(f"unknown config key: {key}")
        if value is not None:
            merged[key] = value
    if merged.get("seed") is None:
        raise ConfigError("missing mandatory field 'seed'")

    values = {key: _coerce(key, value) for key, value in merged.items() if value is not None}
    cfg = ExperimentConfig(experiment=experiment, **values)
    _validate(cfg)
    logger.debug(f"Parsed config for {experiment}: {cfg.params()}")
    return cfg
