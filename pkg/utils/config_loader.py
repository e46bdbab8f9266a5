"""
Configuration Loader for the ABC Consistency Toolkit

Provides typed access to config.yaml. Uses a singleton so every module that
asks for a default reads the same parsed file.
"""

import os
import logging
from pathlib import Path
from typing import Dict, Any, Optional, List

import yaml

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = str(Path(__file__).resolve().parent.parent / "config.yaml")


class ConfigLoader:
    """
    Typed configuration loader.

    Loads configuration from config.yaml and provides typed access methods
    for each section, falling back to built-in defaults when a key is absent.

    Attributes:
        config (Dict[str, Any]): The loaded configuration dictionary

    Example:
        >>> config = ConfigLoader()
        >>> config.get_abc_defaults()['quantile']
        0.01
    """

    _instance: Optional['ConfigLoader'] = None

    def __new__(cls, config_path: str = DEFAULT_CONFIG_PATH):
        """Implement singleton pattern to avoid reloading config."""
        if cls._instance is None:
            cls._instance = super(ConfigLoader, cls).__new__(cls)
            cls._instance._initialized = False
        return cls._instance

    def __init__(self, config_path: str = DEFAULT_CONFIG_PATH):
        """
        Initialize the configuration loader.

        Args:
            config_path: Path to the YAML configuration file

        Raises:
            FileNotFoundError: If config file doesn't exist
            yaml.YAMLError: If config file is invalid YAML
        """
        if self._initialized:
            return

        try:
            if not os.path.exists(config_path):
                raise FileNotFoundError(f"Configuration file not found: {config_path}")

            with open(config_path, 'r') as f:
                self.config = yaml.safe_load(f) or {}

            self.config_path = config_path
            logger.info(f"Configuration loaded successfully from {config_path}")
            self._initialized = True

        except yaml.YAMLError as e:
            logger.error(f"Error parsing YAML configuration: {str(e)}")
            raise
        except Exception as e:
            logger.error(f"Error loading configuration: {str(e)}")
            raise

    def _section(self, name: str) -> Dict[str, Any]:
        return self.config.get(name, {}) or {}

    # Logging Configuration Methods
    def get_logging_config(self) -> Dict[str, Any]:
        """
        Get logging configuration.

        Returns:
            Dictionary with level, format, file, console, file_logging, max_bytes, backup_count
        """
        defaults = {
            'level': 'INFO',
            'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            'file': 'abc_toolkit.log',
            'console': True,
            'file_logging': True,
            'max_bytes': 10485760,
            'backup_count': 5
        }
        return {**defaults, **self._section('logging')}

    # ABC Configuration Methods
    def get_abc_defaults(self) -> Dict[str, Any]:
        """
        Get sampler defaults.

        Returns:
            Dictionary with n_draws, quantile, workers, chunk_size, kde_grid_points
        """
        defaults = {
            'n_draws': 50000,
            'quantile': 0.01,
            'workers': 1,
            'chunk_size': 256,
            'kde_grid_points': 512
        }
        return {**defaults, **self._section('abc')}

    def get_default_workers(self) -> int:
        """Get default worker count."""
        return int(self.get_abc_defaults()['workers'])

    # Model Configuration Methods
    def get_lv_defaults(self) -> Dict[str, Any]:
        """Get Lotka-Volterra experiment constants."""
        defaults = {
            'theta0': [1.0, 1.0],
            'x0': [1.0, 0.5],
            't_end': 15.0,
            'n_points': 500,
            'step': 0.01,
            'noise_sd': [0.5, 0.5],
            'prior_box': [[0.0, 3.0], [0.0, 3.0]]
        }
        return {**defaults, **self._section('models').get('lotka_volterra', {})}

    def get_ma2_prior_box(self) -> List[List[float]]:
        """Get the bounding box used by the MA(2) rejection prior."""
        return self._section('models').get('ma2', {}).get('prior_box', [[-2.0, 2.0], [-1.0, 1.0]])

    def get_search_box(self, model: str) -> Optional[List[List[float]]]:
        """Get the box scanned by grid preimage search for a model, if configured."""
        return self._section('models').get(model, {}).get('search_box')

    # Binding Configuration Methods
    def get_binding_defaults(self) -> Dict[str, Any]:
        """
        Get binding-function solver settings.

        Returns:
            Dictionary with grid sizes, tolerances and refinement limits
        """
        defaults = {
            'preimage_grid': 400,
            'coarse_threshold': 0.1,
            'newton_tolerance': 1e-10,
            'newton_max_iterations': 100,
            'refinement_attempts': 3,
            'dedupe_radius': 1e-6,
            'injectivity_grid': 500,
            'rho_min': 0.05,
            'tau': 0.01,
            'max_polish': 2000,
            'batch_count': 50
        }
        return {**defaults, **self._section('binding')}

    # Diagnostics Configuration Methods
    def get_jump_threshold(self) -> float:
        """Get the jump threshold in pooled posterior standard deviations."""
        return float(self._section('diagnostics').get('jump_threshold', 3.0))

    # Analytic sweep Configuration Methods
    def get_analytic_defaults(self) -> Dict[str, Any]:
        """Get the Gaussian-mean sweep grids."""
        defaults = {
            'theta0': 0.0,
            'delta': 0.1,
            'epsilon_grid': [1.0, 0.1, 0.01, 0.001],
            'size_grid': [100, 1000, 10000, 100000, 1000000],
            'direct_mean_above': 10000000
        }
        return {**defaults, **self._section('analytic')}

    # Experiment presets
    def get_experiment_names(self) -> List[str]:
        """Get the names of all experiment presets."""
        return list(self._section('experiments').keys())

    def get_experiment_preset(self, name: str) -> Dict[str, Any]:
        """
        Get one experiment preset.

        Raises:
            KeyError: If no preset has this name
        """
        presets = self._section('experiments')
        if name not in presets:
            raise KeyError(f"Unknown experiment preset: {name}")
        return dict(presets[name])


# Convenience function for quick access
def load_config(config_path: str = DEFAULT_CONFIG_PATH) -> ConfigLoader:
    """
    Convenience function to load configuration.

    Args:
        config_path: Path to the YAML configuration file

    Returns:
        ConfigLoader instance

    Example:
        >>> config = load_config()
        >>> threshold = config.get_jump_threshold()
    """
    return ConfigLoader(config_path)
