#!/usr/bin/env python3
"""
Configuration management for comb-mapping.

Copyright (c) 2026 comb-mapping contributors
Licensed under the MIT License
"""

import logging
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from .core.forward_solver import SolverOptions
from .core.quadrature import QuadratureSettings

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
VALID_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


@dataclass
class QuadratureConfig:
    """Node counts and tolerances of the Gauss-Legendre rules."""

    nodes_per_panel: int = 16
    grading_ratio: float = 0.25
    max_levels: int = 40
    tail_nodes: int = 16
    closure_tol: float = 1e-11
    identity_tol: float = 1e-8
    inversion_tol: float = 1e-11

    def to_settings(self) -> QuadratureSettings:
        return QuadratureSettings(**asdict(self))


@dataclass
class SolverConfig:
    """Defaults for the forward solver; instance files may override them per run."""

    residual_tol: float = 1e-9
    max_newton_iters: int = 60
    continuation_steps: int = 8
    fd_step: float = 1e-7
    max_halvings: int = 10
    empty_threshold: float = 1e-13

    def to_options(self, overrides: Optional[Dict[str, Any]] = None) -> SolverOptions:
        return SolverOptions(**asdict(self)).merged(overrides)


@dataclass
class EnsembleConfig:
    """Ensemble verification defaults."""

    seed: int = 42
    count: int = 200
    workers: int = 4
    lindelof_pairs: int = 20
    p_values: List[float] = field(default_factory=lambda: [1.0, 1.5, 2.0, 3.0])
    weight_rules: List[str] = field(default_factory=lambda: ["unit", "sobolev"])


@dataclass
class LoggingConfig:
    """Logging configuration."""

    level: str = "WARNING"
    log_file: Optional[str] = None


@dataclass
class CombMapConfig:
    """Main configuration for comb-mapping."""

    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    ensemble: EnsembleConfig = field(default_factory=EnsembleConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)

    output_precision: int = 17

    def __post_init__(self):
        if self.logging.log_file and self.logging.log_file.startswith("~"):
            self.logging.log_file = str(Path(self.logging.log_file).expanduser())


SECTIONS = {
    "quadrature": QuadratureConfig,
    "solver": SolverConfig,
    "ensemble": EnsembleConfig,
    "logging": LoggingConfig,
}


class ConfigManager:
    """Configuration manager for comb-mapping."""

    def __init__(self, config_file: Optional[str] = None):
        """Initialize configuration manager.

        Args:
            config_file: Path to configuration file. If None, uses default locations.
        """
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")
        self.config_file = self._get_config_path(config_file)
        self.config = self.load_config()

    def _get_config_path(self, config_file: Optional[str] = None) -> Path:
        """Get configuration file path."""
        if config_file:
            return Path(config_file)

        possible_paths = [
            Path.cwd() / "combmap.yaml",
            Path.cwd() / "combmap.yml",
            Path.home() / ".combmap" / "config.yaml",
            Path.home() / ".config" / "combmap" / "config.yaml",
        ]

        for path in possible_paths:
            if path.exists():
                return path

        return Path.home() / ".config" / "combmap" / "config.yaml"

    def load_config(self) -> CombMapConfig:
        """Load configuration from file; missing files and sections fall back to defaults."""
        if not self.config_file.exists():
            return CombMapConfig()

        try:
            with open(self.config_file, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f) or {}

            sections = {
                name: cls(**(data.get(name) or {})) for name, cls in SECTIONS.items()
            }
            other_config = {k: v for k, v in data.items() if k not in SECTIONS}
            return CombMapConfig(**sections, **other_config)

        except (OSError, yaml.YAMLError, TypeError) as e:
            self.logger.warning(f"Error loading config {self.config_file}: {e}. Using defaults.")
            return CombMapConfig()

    def save_config(self, config: Optional[CombMapConfig] = None) -> bool:
        """Save configuration to file."""
        config = config or self.config
        try:
            self.config_file.parent.mkdir(parents=True, exist_ok=True)
            with open(self.config_file, "w", encoding="utf-8") as f:
                yaml.dump(asdict(config), f, default_flow_style=False, indent=2)
            return True
        except OSError as e:
            self.logger.error(f"Error saving config: {e}")
            return False

    def get_config(self) -> CombMapConfig:
        """Get current configuration."""
        return self.config

    def update_config(self, **kwargs) -> bool:
        """Update values in memory; section keys are prefixed, e.g. solver_residual_tol."""
        for key, value in kwargs.items():
            section_name, _, attr = key.partition("_")
            section = getattr(self.config, section_name, None) if section_name in SECTIONS else None
            if section is not None and attr in {f.name for f in fields(section)}:
                setattr(section, attr, value)
            elif key in {f.name for f in fields(self.config)} and key not in SECTIONS:
                setattr(self.config, key, value)
            else:
                self.logger.warning(f"Unknown config key: {key}")
                return False
        return True

    def reset_to_defaults(self) -> None:
        """Reset configuration to defaults."""
        self.config = CombMapConfig()

    def validate_config(self) -> List[str]:
        """Validate configuration and return list of issues."""
        issues = []
        quad = self.config.quadrature
        if quad.nodes_per_panel < 2:
            issues.append("Quadrature nodes_per_panel must be at least 2")
        if quad.tail_nodes < 2:
            issues.append("Quadrature tail_nodes must be at least 2")
        if not 0.0 < quad.grading_ratio < 1.0:
            issues.append("Quadrature grading_ratio must lie in (0, 1)")
        if quad.max_levels < 1:
            issues.append("Quadrature max_levels must be positive")
        for name in ("closure_tol", "identity_tol", "inversion_tol"):
            if not getattr(quad, name) > 0:
                issues.append(f"Quadrature {name} must be positive")

        solver = self.config.solver
        if not solver.residual_tol > 0:
            issues.append("Solver residual_tol must be positive")
        if solver.max_newton_iters < 1:
            issues.append("Solver max_newton_iters must be positive")
        if solver.continuation_steps < 1:
            issues.append("Solver continuation_steps must be positive")
        if not solver.fd_step > 0:
            issues.append("Solver fd_step must be positive")

        ensemble = self.config.ensemble
        if ensemble.workers < 1:
            issues.append("Ensemble workers must be at least 1")
        if ensemble.count < 0:
            issues.append("Ensemble count must not be negative")
        if any(not p >= 1 for p in ensemble.p_values):
            issues.append("Ensemble p_values must all be at least 1")
        bad_rules = [w for w in ensemble.weight_rules if w not in ("unit", "sobolev")]
        if bad_rules:
            issues.append(f"Ensemble weight_rules must be 'unit' or 'sobolev', got {bad_rules}")

        if self.config.logging.level not in VALID_LEVELS:
            issues.append(f"Logging level must be one of: {VALID_LEVELS}")

        return issues

    def get_environment_overrides(self) -> Dict[str, Any]:
        """Get configuration overrides from environment variables."""
        overrides: Dict[str, Any] = {}
        parsers = {
            "COMBMAP_THREADS": ("ensemble_workers", int),
            "COMBMAP_RESIDUAL_TOL": ("solver_residual_tol", float),
            "COMBMAP_NODES_PER_PANEL": ("quadrature_nodes_per_panel", int),
            "COMBMAP_LOG_LEVEL": ("logging_level", str.upper),
        }
        for variable, (key, parse) in parsers.items():
            if variable not in os.environ:
                continue
            try:
                overrides[key] = parse(os.environ[variable])
            except ValueError:
                self.logger.warning(f"Ignoring malformed {variable}={os.environ[variable]!r}")
        return overrides

    def apply_environment_overrides(self) -> None:
        """Apply environment variable overrides to configuration."""
        self.update_config(**self.get_environment_overrides())


def configure_logging(config: LoggingConfig) -> None:
    """Route package logs to stderr, plus a file when configured."""
    root = logging.getLogger("comb_mapping")
    for handler in list(root.handlers):
        root.removeHandler(handler)
    formatter = logging.Formatter(LOG_FORMAT)
    stream = logging.StreamHandler(sys.stderr)
    stream.setFormatter(formatter)
    root.addHandler(stream)
    if config.log_file:
        file_handler = logging.FileHandler(config.log_file, encoding="utf-8")
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)
    level = config.level if config.level in VALID_LEVELS else "WARNING"
    root.setLevel(getattr(logging, level))
    root.propagate = False


# Global config manager instance
_config_manager: Optional[ConfigManager] = None


def get_config_manager(config_file: Optional[str] = None) -> ConfigManager:
    """Get global configuration manager instance."""
    global _config_manager
    if _config_manager is None:
        _config_manager = ConfigManager(config_file)
        _config_manager.apply_environment_overrides()
    return _config_manager


def get_config() -> CombMapConfig:
    """Get current configuration."""
    return get_config_manager().get_config()
