#!/usr/bin/env python3
"""
Configuration management for mmfbm-toolkit.
Loads numerical settings from defaults and an explicit user override file.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from lib.constants import (
    Defaults,
    FigureDefaults,
    HarnessDefaults,
    KernelDefaults,
    SimulationDefaults,
    Tolerances,
    TruncationDefaults,
)

# Optional yaml support
try:
    import yaml

    YAML_AVAILABLE = True
except ImportError:
    YAML_AVAILABLE = False

logger = logging.getLogger(__name__)


class Config:
    """Configuration manager for mmfbm-toolkit."""

    DEFAULT_CONFIG_PATH = Path(__file__).parent.parent / "config" / "defaults.json"

    def __init__(self, config_path: Optional[Path] = None):
        """
        Initialize configuration.

        Args:
            config_path: Optional path to a JSON or YAML override file
        """
        self.config: Dict[str, Any] = {}
        self._load_defaults()

        if config_path:
            self._load_user_config(Path(config_path))

    def _load_defaults(self):
        """Load default configuration."""
        if self.DEFAULT_CONFIG_PATH.exists():
            try:
                with open(self.DEFAULT_CONFIG_PATH) as f:
                    self.config = json.load(f)
                return
            except (OSError, ValueError) as e:
                logger.warning(
                    "Failed to load default config from %s: %s", self.DEFAULT_CONFIG_PATH, e
                )

        # If no config found, use fallback
        self.config = self._get_fallback_config()

    def _get_fallback_config(self) -> Dict[str, Any]:
        """Get fallback configuration built from the constants module."""
        return {
            Defaults.CONFIG_KEY: {
                "quadrature": {
                    "abs_tol": Tolerances.ABS_TOL,
                    "rel_tol": Tolerances.REL_TOL,
                    "max_subdivisions": Tolerances.MAX_SUBDIVISIONS,
                },
                "kernels": {
                    "crossover": KernelDefaults.CROSSOVER,
                    "asymptotic_terms": KernelDefaults.ASYMPTOTIC_TERMS,
                },
                "simulate": {
                    "dense_max_points": SimulationDefaults.DENSE_MAX_POINTS,
                    "ridge_scale": SimulationDefaults.RIDGE_SCALE,
                    "ridge_retries": SimulationDefaults.RIDGE_RETRIES,
                    "ridge_growth": SimulationDefaults.RIDGE_GROWTH,
                    "eigen_tolerance": SimulationDefaults.EIGEN_TOLERANCE,
                },
                "truncation": {"max_components": TruncationDefaults.MAX_COMPONENTS},
                "harness": {"z_max": HarnessDefaults.Z_MAX},
                "figures": {
                    "n_points": FigureDefaults.N_POINTS,
                    "n_hurst": FigureDefaults.N_HURST,
                    "h_lo": FigureDefaults.H_LO,
                    "h_hi": FigureDefaults.H_HI,
                    "lambda": FigureDefaults.LAMBDA,
                    "horizon": FigureDefaults.HORIZON,
                    "seeds": list(FigureDefaults.SEEDS),
                },
                "output": {"significant_digits": Defaults.SIGNIFICANT_DIGITS},
                "debug": {"enabled": False, "log_file": None, "verbose": False},
            }
        }

    def _load_user_config(self, path: Path):
        """
        Load user configuration and merge with defaults.

        An explicitly named override that cannot be read is an error.

        Args:
            path: Path to user configuration file

        Raises:
            OSError: If the file cannot be read or parsed
        """
        with open(path) as f:
            if path.suffix in [".yaml", ".yml"]:
                if not YAML_AVAILABLE:
                    raise OSError(f"YAML support not available, cannot read {path}")
                try:
                    user_config = yaml.safe_load(f)
                except yaml.YAMLError as e:
                    raise OSError(f"Malformed YAML in {path}: {e}") from e
            else:
                try:
                    user_config = json.load(f)
                except ValueError as e:
                    raise OSError(f"Malformed JSON in {path}: {e}") from e

        if not isinstance(user_config, dict):
            raise OSError(f"Config file {path} must contain a mapping")

        # Accept both the namespaced and the bare layout
        if Defaults.CONFIG_KEY not in user_config:
            user_config = {Defaults.CONFIG_KEY: user_config}

        self.config = self._merge_configs(self.config, user_config)
        logger.debug("Merged user config from %s", path)

    def _merge_configs(self, base: Dict, override: Dict) -> Dict:
        """
        Recursively merge configuration dictionaries.

        Args:
            base: Base configuration
            override: Override configuration

        Returns:
            Merged configuration
        """
        result = base.copy()

        for key, value in override.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = self._merge_configs(result[key], value)
            else:
                result[key] = value

        return result

    def get(self, key_path: str, default: Any = None) -> Any:
        """
        Get configuration value by dot-separated path.

        Args:
            key_path: Dot-separated configuration key (e.g., "kernels.crossover")
            default: Default value if key not found

        Returns:
            Configuration value or default
        """
        keys = key_path.split(".")
        value = self.config.get(Defaults.CONFIG_KEY, {})

        for key in keys:
            if isinstance(value, dict):
                value = value.get(key)
                if value is None:
                    return default
            else:
                return default

        return value

    def quadrature_spec(self):
        """Get the configured quadrature tolerances as a QuadratureSpec."""
        from lib.special import QuadratureSpec

        return QuadratureSpec(
            abs_tol=float(self.get("quadrature.abs_tol", Tolerances.ABS_TOL)),
            rel_tol=float(self.get("quadrature.rel_tol", Tolerances.REL_TOL)),
            max_subdivisions=int(
                self.get("quadrature.max_subdivisions", Tolerances.MAX_SUBDIVISIONS)
            ),
        )

    def fou_crossover(self) -> float:
        """Get the lambda*t crossover between quadrature and asymptotic branches."""
        return float(self.get("kernels.crossover", KernelDefaults.CROSSOVER))

    def asymptotic_terms(self) -> int:
        """Get the number of terms of the fOU asymptotic expansion."""
        return int(self.get("kernels.asymptotic_terms", KernelDefaults.ASYMPTOTIC_TERMS))

    def dense_max_points(self) -> int:
        """Get the largest grid size accepted by the dense Cholesky method."""
        return int(self.get("simulate.dense_max_points", SimulationDefaults.DENSE_MAX_POINTS))

    def ridge_settings(self) -> Dict[str, float]:
        """Get ridge regularization settings for Cholesky retries."""
        return {
            "scale": float(self.get("simulate.ridge_scale", SimulationDefaults.RIDGE_SCALE)),
            "retries": int(self.get("simulate.ridge_retries", SimulationDefaults.RIDGE_RETRIES)),
            "growth": float(self.get("simulate.ridge_growth", SimulationDefaults.RIDGE_GROWTH)),
        }

    def eigen_tolerance(self) -> float:
        """Get the relative tolerance for clamping negative circulant eigenvalues."""
        return float(self.get("simulate.eigen_tolerance", SimulationDefaults.EIGEN_TOLERANCE))

    def max_components(self) -> int:
        """Get the largest number of components a truncated schedule may keep."""
        return int(self.get("truncation.max_components", TruncationDefaults.MAX_COMPONENTS))

    def z_max(self) -> float:
        """Get the Monte Carlo z-score acceptance threshold."""
        return float(self.get("harness.z_max", HarnessDefaults.Z_MAX))

    def figure_settings(self) -> Dict[str, Any]:
        """Get sample-path figure parameters."""
        return {
            "n_points": int(self.get("figures.n_points", FigureDefaults.N_POINTS)),
            "n_hurst": int(self.get("figures.n_hurst", FigureDefaults.N_HURST)),
            "h_lo": float(self.get("figures.h_lo", FigureDefaults.H_LO)),
            "h_hi": float(self.get("figures.h_hi", FigureDefaults.H_HI)),
            "lambda": float(self.get("figures.lambda", FigureDefaults.LAMBDA)),
            "horizon": float(self.get("figures.horizon", FigureDefaults.HORIZON)),
            "seeds": self.figure_seeds(),
        }

    def figure_seeds(self) -> List[int]:
        """Get the fixed seeds used for figure data."""
        return [int(s) for s in self.get("figures.seeds", FigureDefaults.SEEDS)]

    def significant_digits(self) -> int:
        """Get the number of significant digits for numeric output."""
        return int(self.get("output.significant_digits", Defaults.SIGNIFICANT_DIGITS))

    def is_debug_enabled(self) -> bool:
        """Check if debug mode is enabled."""
        return bool(self.get("debug.enabled", False))

    def is_verbose(self) -> bool:
        """Check if verbose logging is enabled."""
        return bool(self.get("debug.verbose", False))

    def log_file(self) -> Optional[str]:
        """Get the debug log file path, if any."""
        return self.get("debug.log_file")

    def save_user_config(self, config_dict: Dict[str, Any], path: Path):
        """
        Save user configuration.

        Args:
            config_dict: Configuration dictionary to save
            path: Destination; ``.yaml``/``.yml`` suffixes are written as YAML

        Raises:
            OSError: If the file cannot be written
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)

        with open(path, "w") as f:
            if path.suffix in [".yaml", ".yml"]:
                if not YAML_AVAILABLE:
                    raise OSError(f"YAML support not available, cannot save to {path}")
                yaml.safe_dump(config_dict, f, default_flow_style=False, indent=2)
            else:
                json.dump(config_dict, f, indent=2)

        logger.info("Configuration saved to %s", path)


def configure_logging(config: "Config", verbose: bool = False) -> None:
    """
    Configure the root logger from the ``debug`` section.

    Args:
        config: Active configuration
        verbose: Force DEBUG level regardless of the config
    """
    level = logging.WARNING
    if config.is_debug_enabled():
        level = logging.INFO
    if verbose or config.is_verbose():
        level = logging.DEBUG

    handlers: List[logging.Handler] = [logging.StreamHandler()]
    log_file = config.log_file()
    if log_file:
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=level,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        handlers=handlers,
        force=True,
    )


# Global configuration instance
_config: Optional[Config] = None


def get_config() -> Config:
    """Get or create the global configuration instance."""
    global _config
    if _config is None:
        _config = Config()
    return _config


def reload_config(config_path: Optional[Path] = None) -> Config:
    """
    Reload configuration from files.

    Args:
        config_path: Optional path to user configuration
    """
    global _config
    _config = Config(config_path)
    return _config


if __name__ == "__main__":
    config = get_config()
    print("mmfbm-toolkit configuration")
    print("=" * 50)
    print(f"Quadrature: {config.quadrature_spec()}")
    print(f"fOU crossover: {config.fou_crossover()}")
    print(f"Asymptotic terms: {config.asymptotic_terms()}")
    print(f"Dense max points: {config.dense_max_points()}")
    print(f"Ridge: {config.ridge_settings()}")
    print(f"z_max: {config.z_max()}")
    print(f"Figures: {config.figure_settings()}")
