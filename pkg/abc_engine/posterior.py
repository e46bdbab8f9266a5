"""
Posterior containers, kernel density marginals and posterior summaries.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid
from scipy.stats import gaussian_kde

from series_models.types import ParameterVector
from utils.exceptions import DomainError, EmptyPosteriorError

logger = logging.getLogger(__name__)

SILVERMAN_FACTOR = 1.06


@dataclass(eq=False)
class Posterior:
    """
    Accepted ABC draws.

    Attributes:
        thetas: Accepted parameters, shape (n_accepted, p), in draw-index order
        distances: Distance of each accepted draw
        draw_indices: Global index of each accepted draw
        tolerance_used: Tolerance applied (every accepted distance is <= it)
        n_proposed: Number of proposals N
        region_tag: Region of the parameters
        method: "rejection" or "kernel"
        statistics: Name of the statistic set / criterion
        bandwidth: Kernel bandwidth (kernel ABC only)
    """

    thetas: np.ndarray
    distances: np.ndarray
    draw_indices: np.ndarray
    tolerance_used: float
    n_proposed: int
    region_tag: str
    method: str = "rejection"
    statistics: str = ""
    bandwidth: Optional[float] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.thetas = np.asarray(self.thetas, dtype=float)
        if self.thetas.ndim == 1:
            self.thetas = self.thetas.reshape(-1, 1)
        self.distances = np.asarray(self.distances, dtype=float)
        self.draw_indices = np.asarray(self.draw_indices, dtype=int)
        if self.distances.size and np.any(self.distances > self.tolerance_used):
            raise DomainError("An accepted distance exceeds the tolerance used")

    @property
    def n_accepted(self) -> int:
        return int(self.distances.shape[0])

    @property
    def dim(self) -> int:
        return int(self.thetas.shape[1])

    @property
    def acceptance_rate(self) -> float:
        return self.n_accepted / self.n_proposed

    @property
    def no_acceptances(self) -> bool:
        return self.n_accepted == 0

    @property
    def accepted(self) -> List[Tuple[ParameterVector, float]]:
        return [(ParameterVector.of(t, self.region_tag), float(d)) for t, d in zip(self.thetas, self.distances)]

    def require_draws(self, minimum: int = 1) -> None:
        if self.n_accepted < minimum:
            raise EmptyPosteriorError(f"Operation needs at least {minimum} accepted draws, posterior has {self.n_accepted}")

    def to_frame(self) -> pd.DataFrame:
        """Columns theta1..thetap, distance."""
        frame = pd.DataFrame(self.thetas, columns=[f"theta{k + 1}" for k in range(self.thetas.shape[1])])
        frame["distance"] = self.distances
        return frame

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "statistics": self.statistics,
            "tolerance_used": self.tolerance_used,
            "bandwidth": self.bandwidth,
            "n_proposed": self.n_proposed,
            "n_accepted": self.n_accepted,
            "acceptance_rate": self.acceptance_rate,
            "no_acceptances": self.no_acceptances,
            **self.metadata,
        }


@dataclass(eq=False)
class KdeEstimate:
    """Gaussian-kernel density of one posterior coordinate on a grid."""

    grid: np.ndarray
    density: np.ndarray
    bandwidth: float
    coordinate: int = 0

    def integral(self) -> float:
        return float(trapezoid(self.density, self.grid))

    def evaluate(self, x) -> np.ndarray:
        return np.interp(x, self.grid, self.density, left=0.0, right=0.0)

    @property
    def mode(self) -> float:
        return float(self.grid[int(np.argmax(self.density))])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"grid": self.grid, "density": self.density})


def silverman_bandwidth(values: np.ndarray) -> float:
    """1.06 * sigma_hat * n^(-1/5), sigma_hat with ddof = 1."""
    return SILVERMAN_FACTOR * float(np.std(values, ddof=1)) * values.shape[0] ** (-0.2)


def kde_marginal(
    posterior: Union[Posterior, np.ndarray],
    coordinate: int = 0,
    grid: Optional[Union[Sequence[float], np.ndarray]] = None,
    grid_points: int = 512
) -> KdeEstimate:
    """
    Kernel density estimate of one coordinate of the accepted draws.

    Args:
        posterior: Posterior, or a 1-D array of draws
        coordinate: Parameter index
        grid: Explicit evaluation grid, or a (low, high) pair; default spans
            min - 3 bw .. max + 3 bw
        grid_points: Grid size when the grid is generated

    Returns:
        KdeEstimate renormalised to integrate to one on its grid

    Raises:
        EmptyPosteriorError: With fewer than two draws
        DomainError: If the draws have zero spread
    """
    if isinstance(posterior, Posterior):
        posterior.require_draws(2)
        values = posterior.thetas[:, coordinate]
    else:
        values = np.asarray(posterior, dtype=float).ravel()
        if values.shape[0] < 2:
            raise EmptyPosteriorError("A density estimate needs at least two draws")
    bandwidth = silverman_bandwidth(values)
    if not bandwidth > 0:
        raise DomainError("Draws have zero spread; kernel bandwidth would be zero")

    if grid is None:
        grid = np.linspace(values.min() - 3 * bandwidth, values.max() + 3 * bandwidth, grid_points)
    else:
        grid = np.asarray(grid, dtype=float)
        if grid.shape == (2,):
            grid = np.linspace(grid[0], grid[1], grid_points)

    kde = gaussian_kde(values, bw_method=SILVERMAN_FACTOR * values.shape[0] ** (-0.2))
    density = np.maximum(kde(grid), 0.0)
    total = trapezoid(density, grid)
    if total > 0:
        density = density / total
    return KdeEstimate(grid, density, bandwidth, coordinate)


@dataclass(eq=False)
class PosteriorSummary:
    """Coordinate-wise location and spread of a posterior."""

    mean: np.ndarray
    std: np.ndarray
    mode: Optional[np.ndarray]
    n_accepted: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
            "mode": None if self.mode is None else self.mode.tolist(),
            "n_accepted": self.n_accepted,
        }


def posterior_mode(posterior: Posterior, grid_points: int = 512) -> np.ndarray:
    """
    Per-coordinate argmax of the KDE marginals.

    Coordinates with zero spread return their common value.

    Raises:
        EmptyPosteriorError: With fewer than two draws
    """
    posterior.require_draws(2)
    mode = np.empty(posterior.dim)
    for k in range(posterior.dim):
        column = posterior.thetas[:, k]
        if np.ptp(column) == 0:
            mode[k] = column[0]
        else:
            mode[k] = kde_marginal(posterior, k, grid_points=grid_points).mode
    return mode


def posterior_summaries(posterior: Posterior, grid_points: int = 512) -> PosteriorSummary:
    """
    Mean, standard deviation and KDE mode per coordinate.

    A single accepted draw gets std 0 and no mode.

    Raises:
        EmptyPosteriorError: If nothing was accepted
    """
    posterior.require_draws(1)
    mean = posterior.thetas.mean(axis=0)
    std = posterior.thetas.std(axis=0)
    mode = posterior_mode(posterior, grid_points) if posterior.n_accepted >= 2 else None
    return PosteriorSummary(mean, std, mode, posterior.n_accepted)


def concentration_probability(posterior: Posterior, theta0, delta: float) -> float:
    """
    Fraction of accepted draws with ||theta - theta0|| >= delta.

    Raises:
        DomainError: If delta <= 0
        EmptyPosteriorError: If nothing was accepted
    """
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    posterior.require_draws(1)
    center = theta0.as_array() if isinstance(theta0, ParameterVector) else np.asarray(theta0, dtype=float)
    distances = np.linalg.norm(posterior.thetas - center, axis=1)
    return float(np.mean(distances >= delta))
