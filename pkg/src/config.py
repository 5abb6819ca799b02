"""
Configuration management for quasilie.

This module handles analysis configuration loading from environment variables,
.env files, and default values.
"""

import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Tuple

from dotenv import load_dotenv


ENV_PREFIX = "QUASILIE_"


@dataclass
class AnalysisConfig:
    """
    Configuration settings shared by all quasilie operations.

    Configuration is loaded in the following order (later overrides earlier):
    1. Default values
    2. .env file (if present)
    3. Environment variables with QUASILIE_ prefix
    """

    # Logging configuration
    log_level: str = "INFO"
    log_file: Optional[str] = None

    # Lie algebra configuration
    max_dim: int = 64

    # Working interval for t-dependent checks
    interval: Tuple[float, float] = (0.0, 2.0)
    sample_count: int = 257
    sample_tolerance: float = 1e-12

    # Integration configuration
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = 1e-3
    blowup_threshold: float = 1e6
    max_steps: int = 500_000

    # Superposition configuration
    genericity_threshold: float = 1e-8
    companion_max_step: float = 1e-3
    seed: int = 20090101

    # Command execution
    command_timeout: float = 300.0
    debug_mode: bool = False

    @classmethod
    def from_env(cls, env_file: Optional[str] = None) -> "AnalysisConfig":
        """
        Load configuration from environment variables and optional .env file.

        Args:
            env_file: Optional path to .env file. If None, looks for .env in current directory.

        Returns:
            AnalysisConfig instance with loaded configuration.
        """
        if env_file:
            load_dotenv(env_file)
        else:
            env_path = Path(".env")
            if env_path.exists():
                load_dotenv(env_path)

        config = cls()

        if log_level := _env("LOG_LEVEL"):
            config.log_level = log_level.upper()

        if log_file := _env("LOG_FILE"):
            config.log_file = log_file

        config.max_dim = _env_number("MAX_DIM", int, config.max_dim)
        config.sample_count = _env_number("SAMPLE_COUNT", int, config.sample_count)
        config.sample_tolerance = _env_number(
            "SAMPLE_TOLERANCE", float, config.sample_tolerance
        )

        if interval := _env("INTERVAL"):
            try:
                config.interval = parse_span(interval)
            except ValueError:
                pass  # Keep default value

        config.rtol = _env_number("RTOL", float, config.rtol)
        config.atol = _env_number("ATOL", float, config.atol)
        config.max_step = _env_number("MAX_STEP", float, config.max_step)
        config.blowup_threshold = _env_number(
            "BLOWUP_THRESHOLD", float, config.blowup_threshold
        )
        config.max_steps = _env_number("MAX_STEPS", int, config.max_steps)
        config.genericity_threshold = _env_number(
            "GENERICITY_THRESHOLD", float, config.genericity_threshold
        )
        config.companion_max_step = _env_number(
            "COMPANION_MAX_STEP", float, config.companion_max_step
        )
        config.seed = _env_number("SEED", int, config.seed)
        config.command_timeout = _env_number(
            "COMMAND_TIMEOUT", float, config.command_timeout
        )

        if debug := _env("DEBUG"):
            config.debug_mode = debug.lower() in ("true", "1", "yes")

        return config

    def with_overrides(self, **changes) -> "AnalysisConfig":
        """Return a copy with the given fields replaced (None values are ignored)."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    def validate(self) -> None:
        """
        Validate configuration settings.

        Raises:
            ValueError: If configuration is invalid.
        """
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if self.log_level.upper() not in valid_levels:
            raise ValueError(f"Invalid log level: {self.log_level}")

        if self.max_dim <= 0:
            raise ValueError("max_dim must be positive")

        a, b = self.interval
        if not a < b:
            raise ValueError(f"Invalid working interval: [{a}, {b}]")

        if self.sample_count < 2:
            raise ValueError("sample_count must be at least 2")

        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("Tolerances must be positive")

        if self.max_step <= 0 or self.companion_max_step <= 0:
            raise ValueError("Step limits must be positive")

        if self.blowup_threshold <= 1:
            raise ValueError("blowup_threshold must exceed 1")

        if self.genericity_threshold <= 0:
            raise ValueError("genericity_threshold must be positive")

        if self.command_timeout <= 0:
            raise ValueError("command_timeout must be positive")

    def __str__(self) -> str:
        """Return a string representation of the configuration."""
        return (
            f"AnalysisConfig("
            f"log_level={self.log_level}, "
            f"interval={self.interval}, "
            f"rtol={self.rtol}, "
            f"max_dim={self.max_dim}, "
            f"seed={self.seed}"
            f")"
        )


def parse_span(text: str) -> Tuple[float, float]:
    """Parse an ``a:b`` span into a float pair."""
    parts = text.split(":")
    if len(parts) != 2:
        raise ValueError(f"Span must look like 'a:b', got {text!r}")
    a, b = float(parts[0]), float(parts[1])
    if not a < b:
        raise ValueError(f"Span start must be below its end: {text!r}")
    return a, b


def _env(name: str) -> Optional[str]:
    return os.getenv(ENV_PREFIX + name)


def _env_number(name, kind, default):
    raw = _env(name)
    if raw is None:
        return default
    try:
        return kind(raw)
    except ValueError:
        return default
