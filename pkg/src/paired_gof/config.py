"""Application configuration loaded from TOML defaults and environment variables."""

from __future__ import annotations

import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from dotenv import load_dotenv

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from paired_gof.errors import ConfigurationError

load_dotenv()

logger = logging.getLogger(__name__)

# Standard location for the default config file
_DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent.parent / "config" / "default.toml"


@dataclass
class FitDefaults:
    tol: float = 1e-6
    max_iter: int = 500


@dataclass
class BootstrapDefaults:
    n_boot: int = 2000
    max_regen: int = 100
    processes: bool = False


@dataclass
class SimulationDefaults:
    alpha: float = 0.05
    n_rep: int = 10_000


@dataclass
class AppConfig:
    """Top-level application configuration."""

    fit: FitDefaults = field(default_factory=FitDefaults)
    bootstrap: BootstrapDefaults = field(default_factory=BootstrapDefaults)
    simulation: SimulationDefaults = field(default_factory=SimulationDefaults)
    # 0 means one worker per CPU
    threads: int = 1
    log_level: str = "WARNING"
    log_json: bool = False


def _load_toml(path: Path) -> dict[str, Any]:
    """Load a TOML file and return the parsed dict."""
    with open(path, "rb") as f:
        return tomllib.load(f)


def _apply_defaults_to_config(config: AppConfig, defaults: dict[str, Any]) -> None:
    """Apply values from a default.toml dict onto an AppConfig.

    Only keys present in the TOML are set; unknown keys are ignored.
    """
    for section, target in (
        ("fit", config.fit),
        ("bootstrap", config.bootstrap),
        ("simulation", config.simulation),
    ):
        for key, value in defaults.get(section, {}).items():
            if hasattr(target, key):
                setattr(target, key, value)

    runtime = defaults.get("runtime", {})
    if "threads" in runtime:
        config.threads = int(runtime["threads"])

    logging_data = defaults.get("logging", {})
    if "level" in logging_data:
        config.log_level = str(logging_data["level"])
    if "json" in logging_data:
        config.log_json = bool(logging_data["json"])


def _env(name: str, cast: type, current: Any) -> Any:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return current
    try:
        return cast(raw)
    except ValueError as exc:
        raise ConfigurationError(f"{name}={raw!r} is not a valid {cast.__name__}") from exc


def load_app_config(defaults_path: str | Path | None = None) -> AppConfig:
    """Build an AppConfig from default.toml and environment variables.

    Loading order (later wins):
      1. Dataclass defaults
      2. config/default.toml (if it exists)
      3. Environment variables (a ``.env`` file is honoured)

    Command-line flags are applied on top by the CLI.
    """
    config = AppConfig()

    default_path = Path(defaults_path) if defaults_path else _DEFAULT_CONFIG_PATH
    if default_path.is_file():
        try:
            defaults = _load_toml(default_path)
            _apply_defaults_to_config(config, defaults)
            logger.debug("Loaded default config from %s", default_path)
        except Exception as exc:
            logger.warning("Failed to load default config %s: %s", default_path, exc)

    config.threads = _env("PAIRED_GOF_THREADS", int, config.threads)
    config.log_level = _env("PAIRED_GOF_LOG_LEVEL", str, config.log_level)
    config.bootstrap.n_boot = _env("PAIRED_GOF_N_BOOT", int, config.bootstrap.n_boot)
    config.fit.tol = _env("PAIRED_GOF_TOL", float, config.fit.tol)
    config.fit.max_iter = _env("PAIRED_GOF_MAX_ITER", int, config.fit.max_iter)
    return config


def resolve_threads(config: AppConfig) -> int:
    """Worker count: the configured cap, or the CPU count when it is 0 or negative."""
    if config.threads >= 1:
        return config.threads
    return max(1, os.cpu_count() or 1)
