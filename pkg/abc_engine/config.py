"""Sampler configuration."""

import math
import logging
from dataclasses import dataclass, asdict, replace
from typing import Any, Dict, Optional

from utils.config_loader import load_config
from utils.exceptions import DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AbcConfig:
    """
    Settings of one ABC run.

    Exactly one of ``epsilon`` (absolute tolerance, may be +inf) and
    ``quantile`` (accepted fraction in (0, 1)) is set.

    Attributes:
        n_draws: Number of prior proposals N
        seed: Run seed
        epsilon: Absolute tolerance
        quantile: Accepted fraction of the N proposals
        series_length: Simulated length; None means the observed length
        workers: joblib workers
        chunk_size: Proposals per work item
        kde_grid_points: Evaluation points of each KDE marginal
    """

    n_draws: int
    seed: int
    epsilon: Optional[float] = None
    quantile: Optional[float] = None
    series_length: Optional[int] = None
    workers: int = 1
    chunk_size: int = 256
    kde_grid_points: int = 512

    def __post_init__(self):
        if self.seed is None or int(self.seed) < 0:
            raise DomainError(f"A non-negative seed is required, got {self.seed!r}")
        if int(self.n_draws) < 1:
            raise DomainError(f"n_draws must be >= 1, got {self.n_draws}")
        if (self.epsilon is None) == (self.quantile is None):
            raise DomainError("Set exactly one of epsilon and quantile")
        if self.epsilon is not None and not self.epsilon >= 0:
            raise DomainError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.quantile is not None and not 0.0 < self.quantile < 1.0:
            raise DomainError(f"quantile must lie strictly inside (0, 1), got {self.quantile}")
        if int(self.workers) < 1 or int(self.chunk_size) < 1:
            raise DomainError("workers and chunk_size must be >= 1")

    @property
    def tolerance_mode(self) -> str:
        return "quantile" if self.quantile is not None else "absolute"

    @property
    def accepted_count(self) -> Optional[int]:
        """ceil(q * N) in quantile mode."""
        if self.quantile is None:
            return None
        return quantile_count(self.quantile, self.n_draws)

    def with_tolerance(self, epsilon: Optional[float] = None, quantile: Optional[float] = None) -> "AbcConfig":
        return replace(self, epsilon=epsilon, quantile=quantile)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_defaults(cls, seed: int, **overrides) -> "AbcConfig":
        """
        Build from the ``abc`` section of config.yaml.

        Passing ``epsilon`` switches to absolute mode.
        """
        defaults = load_config().get_abc_defaults()
        settings = {
            "n_draws": int(defaults["n_draws"]),
            "quantile": float(defaults["quantile"]),
            "workers": int(defaults["workers"]),
            "chunk_size": int(defaults["chunk_size"]),
            "kde_grid_points": int(defaults["kde_grid_points"]),
        }
        overrides = {k: v for k, v in overrides.items() if v is not None}
        if "epsilon" in overrides:
            settings.pop("quantile")
        settings.update(overrides)
        return cls(seed=seed, **settings)


def quantile_count(quantile: float, n: int) -> int:
    """ceil(q * n), robust to binary rounding of q * n, and at least 1."""
    return max(1, min(n, math.ceil(quantile * n - 1e-9)))
