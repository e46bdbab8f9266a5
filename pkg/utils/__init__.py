"""
Utilities Module for the ABC Consistency Toolkit

Shared infrastructure used by every package:
- Configuration management (config_loader)
- Exception hierarchy (exceptions)
- Retry logic for numeric refinement (retry_utils)
- Counter-based random streams (rng)
- Worker pool (parallel)
- CSV/JSON output (io_utils)
"""

from .config_loader import ConfigLoader, load_config
from .exceptions import (
    AbcToolkitError,
    ConfigError,
    DegenerateDesignError,
    DomainError,
    EmptyPosteriorError,
    IntegrationError,
    RefinementError,
)
from .retry_utils import create_refinement_retrying, retry_refinement
from .rng import make_generator
from .parallel import chunk_indices, parallel_map
from .io_utils import file_checksum, write_csv, write_json_atomic

__all__ = [
    'ConfigLoader',
    'load_config',
    'AbcToolkitError',
    'ConfigError',
    'DegenerateDesignError',
    'DomainError',
    'EmptyPosteriorError',
    'IntegrationError',
    'RefinementError',
    'create_refinement_retrying',
    'retry_refinement',
    'make_generator',
    'chunk_indices',
    'parallel_map',
    'file_checksum',
    'write_csv',
    'write_json_atomic',
]

__version__ = "1.0.0"
