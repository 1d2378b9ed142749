#!/usr/bin/env python3
"""
Configuration
Run configuration assembled from defaults, an optional key=value file and command-line flags
"""

import os
from dataclasses import dataclass
from typing import Optional, Tuple

from dotenv import dotenv_values, load_dotenv

from coefficients import DEFAULT_KMAX, MAX_KMAX
from errors import ConfigError, FunkError
from inversion import DEFAULT_AUTO_CAP, DEFAULT_AUTO_TOL, DEFAULT_PROFILE_NU, DEFAULT_PROFILE_TAU
from phantoms import get_phantom
from quadrature import DEFAULT_CIRCLE_NODES
from sphere_geom import NORTH, parse_unit_vector

THREADS_ENV = "FUNK_THREADS"
COMMANDS = ("forward", "invert", "coeffs", "verify", "convergence")
FORMATS = ("csv", "json")
SUITES = ("all", "phantoms", "identities", "theorem3", "recurrence", "oracle", "evenness")
MIN_COUNT = 8

FORWARD_NU, FORWARD_TAU = 32, 64


@dataclass(frozen=True)
class RunConfig:
    """Validated settings of one CLI invocation"""

    command: str
    phantom: Optional[str] = None
    input: Optional[str] = None
    pole: Tuple[float, float, float] = tuple(NORTH)
    points: Tuple[Tuple[float, float, float], ...] = ()
    nu_steps: Optional[int] = None
    tau_steps: Optional[int] = None
    circle_nodes: int = DEFAULT_CIRCLE_NODES
    n: Optional[int] = None
    auto: bool = False
    tol: float = DEFAULT_AUTO_TOL
    cap: int = DEFAULT_AUTO_CAP
    kmax: int = DEFAULT_KMAX
    output: Optional[str] = None
    format: Optional[str] = None
    suite: str = "all"
    trials: int = 100
    seed: int = 0
    stop_tol: Optional[float] = None
    p_samples: int = 0
    corrupt: Optional[Tuple[int, int]] = None
    workers: int = 1
    quiet: bool = False


def _vector(text):
    return tuple(parse_unit_vector(text).tolist())


def _points(value):
    if isinstance(value, (list, tuple)):
        return tuple(_vector(v) for v in value)
    return (_vector(value),)


def _pair(text):
    try:
        k, m = (int(p) for p in str(text).split(","))
    except ValueError:
        raise ConfigError(f"--corrupt expects k,m, got {text!r}")
    return k, m


def _flag(value):
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in ("1", "true", "yes", "on")


class ConfigManager:
    """Builds RunConfig objects"""

    # Keys accepted in a config file, with converters from their text form
    CONVERTERS = {
        "phantom": str,
        "input": str,
        "pole": _vector,
        "point": _points,
        "nu_steps": int,
        "tau_steps": int,
        "circle_nodes": int,
        "n": int,
        "auto": _flag,
        "tol": float,
        "cap": int,
        "kmax": int,
        "output": str,
        "format": str,
        "suite": str,
        "trials": int,
        "seed": int,
        "stop_tol": float,
        "p_samples": int,
        "corrupt": _pair,
        "quiet": _flag,
    }

    @staticmethod
    def load_file(path):
        """
        Read a key=value config file

        Args:
            path: File path

        Returns:
            Dict of raw string values
        """
        if not os.path.isfile(path):
            raise ConfigError(f"config file not found: {path}")
        values = dotenv_values(path)
        unknown = sorted(set(values) - set(ConfigManager.CONVERTERS))
        if unknown:
            raise ConfigError(f"unknown config keys in {path}: {', '.join(unknown)}")
        return {k: v for k, v in values.items() if v is not None}

    @staticmethod
    def thread_count():
        """Worker threads from FUNK_THREADS (default 1)"""
        load_dotenv()
        raw = os.getenv(THREADS_ENV, "1")
        try:
            workers = int(raw)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}")
        if workers < 1:
            raise ConfigError(f"{THREADS_ENV} must be >= 1, got {workers}")
        return workers

    @staticmethod
    def build(command, flags, config_path=None):
        """
        Merge defaults, the config file and flags, then validate

        Args:
            command: Sub-command name
            flags: Dict of flag values; None means "not given"
            config_path: Optional key=value file

        Returns:
            RunConfig

        Raises:
            ConfigError: On any invalid or missing setting
        """
        if command not in COMMANDS:
            raise ConfigError(f"unknown command {command!r}")
        merged = dict(ConfigManager.load_file(config_path)) if config_path else {}
        merged.update({k: v for k, v in flags.items() if v is not None and v != []})

        values = {}
        for key, raw in merged.items():
            if key not in ConfigManager.CONVERTERS:
                continue
            try:
                values[key] = ConfigManager.CONVERTERS[key](raw)
            except ConfigError:
                raise
            except (FunkError, ValueError, TypeError) as exc:
                raise ConfigError(f"invalid value {raw!r} for --{key.replace('_', '-')}: {exc}") from exc
        if "point" in values:
            values["points"] = values.pop("point")

        ConfigManager._apply_command_defaults(command, values)
        config = RunConfig(command=command, workers=ConfigManager.thread_count(), **values)
        ConfigManager.validate(config)
        return config

    @staticmethod
    def _apply_command_defaults(command, values):
        values.setdefault("cap", min(DEFAULT_AUTO_CAP, values.get("kmax", DEFAULT_KMAX)))
        if command == "forward":
            values.setdefault("nu_steps", FORWARD_NU)
            values.setdefault("tau_steps", FORWARD_TAU)
            values.setdefault("format", "csv")
        elif command in ("invert", "convergence"):
            values.setdefault("nu_steps", DEFAULT_PROFILE_NU)
            values.setdefault("tau_steps", DEFAULT_PROFILE_TAU)
            values.setdefault("points", (tuple(NORTH),))
            values.setdefault("format", "json" if command == "invert" else "csv")
        else:
            values.setdefault("format", "json")

    @staticmethod
    def validate(config):
        """Check counts, tolerances, vectors and paths before any compute"""
        for name in ("nu_steps", "tau_steps", "circle_nodes"):
            value = getattr(config, name)
            if value is not None and value < MIN_COUNT:
                raise ConfigError(f"--{name.replace('_', '-')} must be >= {MIN_COUNT}, got {value}")
        if config.circle_nodes % 2:
            raise ConfigError(f"--circle-nodes must be even, got {config.circle_nodes}")
        if not config.tol > 0.0:
            raise ConfigError(f"--tol must be positive, got {config.tol}")
        if config.stop_tol is not None and not config.stop_tol > 0.0:
            raise ConfigError(f"--stop-tol must be positive, got {config.stop_tol}")
        if not 1 <= config.kmax <= MAX_KMAX:
            raise ConfigError(f"--max must lie in 1..{MAX_KMAX}, got {config.kmax}")
        if config.n is not None and not 1 <= config.n <= config.kmax:
            raise ConfigError(f"--n must lie in 1..{config.kmax}, got {config.n}")
        if not 1 <= config.cap <= config.kmax:
            raise ConfigError(f"--cap must lie in 1..{config.kmax}, got {config.cap}")
        if config.trials < 1:
            raise ConfigError(f"--trials must be >= 1, got {config.trials}")
        if config.format not in FORMATS:
            raise ConfigError(f"--format must be one of {', '.join(FORMATS)}, got {config.format!r}")
        if config.suite not in SUITES:
            raise ConfigError(f"--suite must be one of {', '.join(SUITES)}, got {config.suite!r}")

        if config.command in ("forward", "invert", "convergence"):
            ConfigManager._validate_source(config)
        if config.command == "invert":
            if config.n is not None and config.auto:
                raise ConfigError("--n and --auto are mutually exclusive")
            if config.n is None and not config.auto:
                raise ConfigError("give --n or --auto")
        if config.command == "convergence" and config.n is None:
            raise ConfigError("convergence needs --n (largest n to report)")
        if config.command == "coeffs" and config.format != "json":
            raise ConfigError("coefficient tables are written as JSON only")
        if config.output is not None and not os.path.isdir(os.path.dirname(os.path.abspath(config.output))):
            raise ConfigError(f"output directory does not exist for {config.output}")

    @staticmethod
    def _validate_source(config):
        if config.command == "forward" and config.phantom is None:
            raise ConfigError("forward needs --phantom")
        if config.phantom is None and config.input is None:
            raise ConfigError("missing --phantom or --input")
        if config.phantom is not None and config.input is not None:
            raise ConfigError("--phantom and --input are mutually exclusive")
        if config.input is not None and not os.path.isfile(config.input):
            raise ConfigError(f"input grid not found: {config.input}")
        if config.phantom is not None:
            try:
                get_phantom(config.phantom)
            except FunkError as exc:
                raise ConfigError(f"--phantom: {exc}") from exc
