"""
Distances between observed and simulated summaries.

Quadratic kinds share one form, d = sqrt(delta' W delta):
    euclidean               W = I
    diag_variance_weighted  W = diag(1 / sigma^2), sigma from simulated statistics
    covariance_weighted     W = Sigma^{-1}, Sigma from simulated statistics
    score_ols_ar2           W = Omega, delta = criterion gradient at beta_hat(y)
The LV raw-path distance is the mean over observation times of the squared
coordinate differences, without a square root.
"""

import logging
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from series_models.types import TimeSeries
from summaries.ols import ols_ar2_criterion_gradient, ols_ar2_estimate
from summaries.types import SummaryVector
from utils.exceptions import DomainError

logger = logging.getLogger(__name__)

DISTANCE_KINDS = (
    "euclidean",
    "diag_variance_weighted",
    "covariance_weighted",
    "score_ols_ar2",
    "lv_raw_path",
)

Operand = Union[SummaryVector, TimeSeries, np.ndarray]


def _check_positive_definite(matrix: np.ndarray, what: str) -> np.ndarray:
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if matrix.shape[0] != matrix.shape[1]:
        raise DomainError(f"{what} must be square, got shape {matrix.shape}")
    if not np.allclose(matrix, matrix.T, rtol=1e-10, atol=1e-12):
        raise DomainError(f"{what} must be symmetric")
    try:
        np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        logger.error(f"{what} is not positive definite")
        raise DomainError(f"{what} is not positive definite")
    return matrix


@dataclass(frozen=True, eq=False)
class DistanceSpec:
    """
    Distance kind plus the scaling data it needs.

    Attributes:
        kind: One of DISTANCE_KINDS
        scale: Per-component standard deviations (diag_variance_weighted)
        covariance: Statistic covariance (covariance_weighted)
        weight: Omega for the score distance; identity when None
    """

    kind: str = "euclidean"
    scale: Optional[np.ndarray] = None
    covariance: Optional[np.ndarray] = None
    weight: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in DISTANCE_KINDS:
            raise DomainError(f"Unknown distance kind: {self.kind}")
        if self.scale is not None:
            scale = np.asarray(self.scale, dtype=float)
            if np.any(~np.isfinite(scale)) or np.any(scale <= 0):
                raise DomainError("Component scales must be finite and positive")
            object.__setattr__(self, "scale", scale)
        if self.covariance is not None:
            object.__setattr__(self, "covariance", _check_positive_definite(self.covariance, "Statistic covariance"))
        if self.weight is not None:
            object.__setattr__(self, "weight", _check_positive_definite(self.weight, "Score weighting matrix"))

    @property
    def needs_calibration(self) -> bool:
        return (self.kind == "diag_variance_weighted" and self.scale is None) or (
            self.kind == "covariance_weighted" and self.covariance is None
        )

    @property
    def works_on_paths(self) -> bool:
        return self.kind == "lv_raw_path"

    def calibrated(self, simulated: np.ndarray) -> "DistanceSpec":
        """
        Fill in scale or covariance from simulated statistics (rows = draws).

        Non-finite rows are ignored.

        Raises:
            DomainError: If a component has zero spread
        """
        if not self.needs_calibration:
            return self
        rows = np.asarray(simulated, dtype=float)
        rows = rows[np.all(np.isfinite(rows), axis=1)]
        if rows.shape[0] < 2:
            raise DomainError("Calibrating a weighted distance needs at least two finite simulated statistics")
        if self.kind == "diag_variance_weighted":
            scale = rows.std(axis=0, ddof=1)
            if np.any(scale <= 0):
                raise DomainError("A simulated statistic has zero spread; cannot scale it")
            return replace(self, scale=scale)
        return replace(self, covariance=np.cov(rows, rowvar=False))

    def quadratic_weight(self, dimension: int) -> np.ndarray:
        """The matrix W of the quadratic kinds."""
        if self.kind == "euclidean":
            return np.eye(dimension)
        if self.kind == "diag_variance_weighted":
            self._require(self.scale, "scale")
            return np.diag(1.0 / self.scale ** 2)
        if self.kind == "covariance_weighted":
            self._require(self.covariance, "covariance")
            return np.linalg.inv(self.covariance)
        if self.kind == "score_ols_ar2":
            return np.eye(dimension) if self.weight is None else self.weight
        raise DomainError(f"Distance '{self.kind}' is not a quadratic form")

    def _require(self, value, what: str) -> None:
        if value is None:
            raise DomainError(f"Distance '{self.kind}' has no {what}; calibrate it first")

    def describe(self) -> dict:
        info = {"kind": self.kind}
        for name in ("scale", "covariance", "weight"):
            value = getattr(self, name)
            if value is not None:
                info[name] = np.asarray(value).tolist()
        return info


def _data(operand: Operand) -> np.ndarray:
    if isinstance(operand, SummaryVector):
        return operand.values
    if isinstance(operand, TimeSeries):
        return operand.observations
    return np.asarray(operand, dtype=float)


def lv_raw_path_distance(observed: np.ndarray, simulated: np.ndarray) -> float:
    """(1/R_T) * sum_j sum_i (y_j(t_i) - z_j(t_i))^2."""
    if observed.shape != simulated.shape:
        raise DomainError(f"Path shapes differ: {observed.shape} vs {simulated.shape}")
    diff = observed - simulated
    return float(np.sum(diff * diff) / observed.shape[0])


def quadratic_distances(observed: np.ndarray, simulated: np.ndarray, weight: np.ndarray) -> np.ndarray:
    """Row-wise sqrt(delta' W delta); NaN rows become +inf."""
    simulated = np.atleast_2d(simulated)
    if simulated.shape[1] != observed.shape[0]:
        raise DomainError(f"Dimension mismatch: {observed.shape[0]} vs {simulated.shape[1]}")
    delta = simulated - observed
    with np.errstate(invalid="ignore"):
        squared = np.einsum("ij,jk,ik->i", delta, weight, delta)
    out = np.sqrt(np.maximum(squared, 0.0))
    out[~np.isfinite(out)] = np.inf
    return out


def compute_distance(spec: DistanceSpec, a: Operand, b: Operand) -> float:
    """
    Distance between an observed operand ``a`` and a simulated operand ``b``.

    Summary kinds take SummaryVectors (or arrays). ``lv_raw_path`` takes two
    bivariate series. ``score_ols_ar2`` takes two scalar series: the criterion
    gradient of ``b`` is evaluated at the OLS estimate of ``a``.

    Raises:
        DomainError: On dimension mismatch, missing calibration or a non-PD weight

    Example:
        >>> compute_distance(DistanceSpec("euclidean"), np.array([1.0, 0.0]), np.array([0.0, 1.0]))
        1.4142135623730951
    """
    x, y = _data(a), _data(b)
    if spec.kind == "lv_raw_path":
        return lv_raw_path_distance(x, y)
    if spec.kind == "score_ols_ar2":
        beta_hat = ols_ar2_estimate(x).beta
        gradient = ols_ar2_criterion_gradient(y, beta_hat)
        weight = spec.quadratic_weight(2)
        return float(np.sqrt(max(gradient @ weight @ gradient, 0.0)))
    if x.shape != y.shape or x.ndim != 1:
        raise DomainError(f"Dimension mismatch: {x.shape} vs {y.shape}")
    return float(quadratic_distances(x, y[None, :], spec.quadratic_weight(x.shape[0]))[0])
