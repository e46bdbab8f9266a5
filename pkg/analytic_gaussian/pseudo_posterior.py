"""
Closed-form ABC posterior of the Gaussian-mean example.

With a N(0, 1) prior, N(theta, 1) data, eta = sample mean and a Gaussian
kernel of scale epsilon, the pseudo-posterior is

    N( eta(y) / (1/T + eps^2 + 1),  (1 + T eps^2) / (T + 1 + T eps^2) )

The tail probability outside (theta0 - delta, theta0 + delta) is available
two ways: the Erf expression, whose delta -> 0 limit is sqrt(2)/2,
and the exact normal-CDF tail, whose limit is 1. Both are reported side by
side; neither is corrected towards the other.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import special
from scipy.stats import norm

from utils.config_loader import load_config
from utils.exceptions import DomainError
from utils.rng import SWEEP_STREAM, make_generator

logger = logging.getLogger(__name__)

ERF_PREFACTOR = np.sqrt(2.0) / 4.0
ORDERS = ("eps_then_T", "T_then_eps")
ETA_MODES = ("simulated", "fixed")
CORNER_LEVEL = 1e-3
SWEEP_COLUMNS = ("order", "T", "epsilon", "x1", "x2", "prob_paper", "prob_oracle")


def _check_size_and_epsilon(T: float, epsilon: float) -> None:
    if not T >= 1:
        raise DomainError(f"Sample size must be >= 1, got {T}")
    if not epsilon >= 0:
        raise DomainError(f"epsilon must be >= 0, got {epsilon}")


@dataclass(frozen=True)
class PseudoPosterior:
    """Normal pseudo-posterior N(mean, variance) of the Gaussian-mean example."""

    eta_y: float
    T: float
    epsilon: float

    @property
    def mean(self) -> float:
        return self.eta_y / (1.0 / self.T + self.epsilon ** 2 + 1.0)

    @property
    def variance(self) -> float:
        scaled = self.T * self.epsilon ** 2
        return (1.0 + scaled) / (self.T + 1.0 + scaled)

    @property
    def std(self) -> float:
        return float(np.sqrt(self.variance))


def pseudo_posterior_params(eta_y: float, T: float, epsilon: float) -> PseudoPosterior:
    """
    Mean and variance of the pseudo-posterior.

    Raises:
        DomainError: If T < 1 or epsilon < 0

    Example:
        >>> post = pseudo_posterior_params(1.0, 1, 0.0)
        >>> post.mean, post.variance
        (0.5, 0.5)
    """
    _check_size_and_epsilon(T, epsilon)
    return PseudoPosterior(float(eta_y), float(T), float(epsilon))


@dataclass(frozen=True)
class TailQuery:
    """
    One evaluation point of the tail probability.

    Attributes:
        theta0: Centre of the neighbourhood
        delta: Neighbourhood radius, > 0
        eta_y: Observed sample mean
        T: Sample size, >= 1
        epsilon: Kernel scale, >= 0
    """

    theta0: float
    delta: float
    eta_y: float
    T: float
    epsilon: float

    def __post_init__(self):
        if not self.delta > 0:
            raise DomainError(f"delta must be positive, got {self.delta}")
        _check_size_and_epsilon(self.T, self.epsilon)


def erf(x):
    """
    The error function (2/sqrt(pi)) * integral_0^x exp(-t^2) dt.

    Odd and bounded in (-1, 1); accepts scalars or arrays.
    """
    return special.erf(x)


def x_terms(query: TailQuery) -> Tuple[float, float]:
    """
    The two Erf arguments of the tail probability.

    x1 = sqrt((T eps^2 + T + 1) / (T eps^2 + 1)) * (delta - theta0 + eta_y / (eps^2 + 1/T + 1))
    x2 = the same factor times (delta + theta0 - eta_y / (eps^2 + 1/T + 1))

    Example:
        >>> x_terms(TailQuery(theta0=0.0, delta=0.1, eta_y=0.0, T=3, epsilon=0.0))
        (0.2, 0.2)
    """
    T, eps2 = float(query.T), float(query.epsilon) ** 2
    factor = np.sqrt((T * eps2 + T + 1.0) / (T * eps2 + 1.0))
    shrunk = query.eta_y / (eps2 + 1.0 / T + 1.0)
    x1 = factor * (query.delta - query.theta0 + shrunk)
    x2 = factor * (query.delta + query.theta0 - shrunk)
    return float(x1), float(x2)


def tail_prob_erf(query: TailQuery) -> float:
    """
    -(sqrt(2)/4)(Erf(x1) - 1) - (sqrt(2)/4)(Erf(x2) - 1).

    Evaluated as (sqrt(2)/4)(erfc(x1) + erfc(x2)), the same quantity without
    the cancellation in 1 - Erf for large arguments. Lies in [0, sqrt(2)/2].
    """
    x1, x2 = x_terms(query)
    return float(ERF_PREFACTOR * (special.erfc(x1) + special.erfc(x2)))


def tail_prob_cdf_oracle(query: TailQuery) -> float:
    """
    Pr(theta <= theta0 - delta) + Pr(theta >= theta0 + delta) under the
    pseudo-posterior, from the standard normal CDF. Lies in [0, 1].
    """
    post = pseudo_posterior_params(query.eta_y, query.T, query.epsilon)
    lower = norm.cdf(query.theta0 - query.delta, loc=post.mean, scale=post.std)
    upper = norm.sf(query.theta0 + query.delta, loc=post.mean, scale=post.std)
    return float(lower + upper)


def observed_mean(theta0: float, T: int, seed: int, direct_above: float) -> float:
    """
    Seeded sample mean of T draws from N(theta0, 1).

    Above ``direct_above`` the mean is drawn from its exact N(theta0, 1/T) law
    instead of averaging T values.
    """
    rng = make_generator(seed, SWEEP_STREAM, int(T))
    if T > direct_above:
        return float(theta0 + rng.standard_normal() / np.sqrt(T))
    return float(theta0 + rng.standard_normal(int(T)).mean())


@dataclass(eq=False)
class SweepResult:
    """
    Tail probabilities along one limit order.

    Attributes:
        order: "eps_then_T" or "T_then_eps"
        frame: Columns SWEEP_COLUMNS; prob_paper holds tail_prob_erf
        converged: Both probabilities below 1e-3 at the grid corner (largest T, smallest epsilon)
        observed_means: eta(y) used at each T
    """

    order: str
    frame: pd.DataFrame
    converged: bool
    observed_means: Dict[int, float] = field(default_factory=dict)

    @property
    def corner(self) -> Dict[str, Any]:
        return self.frame.iloc[-1].to_dict()

    def to_frame(self) -> pd.DataFrame:
        return self.frame

    def to_dict(self) -> Dict[str, Any]:
        return {
            "order": self.order,
            "converged": self.converged,
            "corner": self.corner,
            "rows": len(self.frame),
            "observed_means": {str(T): eta for T, eta in self.observed_means.items()},
        }


def _validate_grids(epsilon_grid: Sequence[float], size_grid: Sequence[int]) -> None:
    if not epsilon_grid or not size_grid:
        raise DomainError("Sweep grids must be nonempty")
    if any(e < 0 for e in epsilon_grid) or any(b >= a for a, b in zip(epsilon_grid, epsilon_grid[1:])):
        raise DomainError(f"epsilon grid must be non-negative and strictly decreasing, got {list(epsilon_grid)}")
    if any(t < 1 for t in size_grid) or any(b <= a for a, b in zip(size_grid, size_grid[1:])):
        raise DomainError(f"T grid must be >= 1 and strictly increasing, got {list(size_grid)}")


def sequential_limit_sweep(
    order: str,
    theta0: Optional[float] = None,
    delta: Optional[float] = None,
    epsilon_grid: Optional[Sequence[float]] = None,
    size_grid: Optional[Sequence[int]] = None,
    seed: int = 0,
    eta_mode: str = "simulated",
    direct_mean_above: Optional[float] = None
) -> SweepResult:
    """
    Evaluate both tail probabilities along a nested limit.

    ``eps_then_T`` sweeps epsilon to its smallest value inside each T, with T
    increasing in the outer loop; ``T_then_eps`` nests the other way round.
    The last row of either order is the grid corner (largest T, smallest
    epsilon). eta(y) is a seeded sample mean per T ("simulated") or theta0
    itself ("fixed").

    Args:
        order: "eps_then_T" or "T_then_eps"
        theta0: True mean (config default)
        delta: Neighbourhood radius (config default)
        epsilon_grid: Strictly decreasing kernel scales (config default)
        size_grid: Strictly increasing sample sizes (config default)
        seed: Seed of the simulated means
        eta_mode: "simulated" or "fixed"
        direct_mean_above: T beyond which the mean is drawn from its exact law

    Returns:
        SweepResult

    Raises:
        DomainError: On an unknown order or mode, or malformed grids
    """
    if order not in ORDERS:
        raise DomainError(f"Unknown limit order '{order}'; expected one of {ORDERS}")
    if eta_mode not in ETA_MODES:
        raise DomainError(f"Unknown eta mode '{eta_mode}'; expected one of {ETA_MODES}")
    defaults = load_config().get_analytic_defaults()
    theta0 = float(theta0 if theta0 is not None else defaults["theta0"])
    delta = float(delta if delta is not None else defaults["delta"])
    epsilon_grid = [float(e) for e in (epsilon_grid if epsilon_grid is not None else defaults["epsilon_grid"])]
    size_grid = [int(t) for t in (size_grid if size_grid is not None else defaults["size_grid"])]
    direct_above = float(direct_mean_above if direct_mean_above is not None else defaults["direct_mean_above"])
    _validate_grids(epsilon_grid, size_grid)

    etas = {
        T: (observed_mean(theta0, T, seed, direct_above) if eta_mode == "simulated" else theta0)
        for T in size_grid
    }
    if order == "eps_then_T":
        cells = [(T, eps) for T in size_grid for eps in epsilon_grid]
    else:
        cells = [(T, eps) for eps in epsilon_grid for T in size_grid]

    rows = []
    for T, eps in cells:
        query = TailQuery(theta0, delta, etas[T], T, eps)
        x1, x2 = x_terms(query)
        rows.append({
            "order": order,
            "T": T,
            "epsilon": eps,
            "x1": x1,
            "x2": x2,
            "prob_paper": tail_prob_erf(query),
            "prob_oracle": tail_prob_cdf_oracle(query),
        })
    frame = pd.DataFrame(rows, columns=list(SWEEP_COLUMNS))
    corner = frame.iloc[-1]
    converged = bool(corner["prob_paper"] < CORNER_LEVEL and corner["prob_oracle"] < CORNER_LEVEL)
    if converged:
        logger.info(f"{order}: both tail probabilities below {CORNER_LEVEL:g} at T={corner['T']}, eps={corner['epsilon']:g}")
    else:
        logger.warning(
            f"{order}: corner T={corner['T']}, eps={corner['epsilon']:g} gives erf={corner['prob_paper']:.3g}, "
            f"oracle={corner['prob_oracle']:.3g}"
        )
    return SweepResult(order, frame, converged, etas)
