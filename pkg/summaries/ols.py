"""
AR(2) least-squares auxiliary criterion.

    Q(y; beta) = (1/T) * sum_{t=3..T} (y_t - beta1 y_{t-1} - beta2 y_{t-2})^2

The minimiser is the exact 2x2 normal-equations solution.
"""

import logging

import numpy as np

from utils.exceptions import DegenerateDesignError, DomainError

from .moments import SeriesLike, as_scalar_array
from .types import AuxiliaryEstimate

logger = logging.getLogger(__name__)

MIN_LENGTH = 5
SINGULAR_TOLERANCE = 1e-12


def _design(series: SeriesLike):
    y = as_scalar_array(series)
    if y.shape[0] < MIN_LENGTH:
        raise DomainError(f"AR(2) criterion needs T >= {MIN_LENGTH}, got {y.shape[0]}")
    return y[2:], y[1:-1], y[:-2], y.shape[0]


def _residuals(target, lag1, lag2, beta) -> np.ndarray:
    return target - beta[0] * lag1 - beta[1] * lag2


def ols_ar2_estimate(series: SeriesLike) -> AuxiliaryEstimate:
    """
    Minimise Q(y; beta) by solving the normal equations.

    Raises:
        DomainError: If T < 5
        DegenerateDesignError: If the normal matrix is singular
    """
    target, lag1, lag2, n = _design(series)
    gram = np.array([
        [np.dot(lag1, lag1), np.dot(lag1, lag2)],
        [np.dot(lag1, lag2), np.dot(lag2, lag2)],
    ])
    scale = np.trace(gram)
    det = np.linalg.det(gram)
    if scale == 0.0 or abs(det) <= SINGULAR_TOLERANCE * scale * scale:
        logger.error(f"Singular AR(2) normal matrix (det={det:g}, trace={scale:g})")
        raise DegenerateDesignError("AR(2) normal-equations matrix is singular")
    rhs = np.array([np.dot(lag1, target), np.dot(lag2, target)])
    beta = np.linalg.solve(gram, rhs)
    resid = _residuals(target, lag1, lag2, beta)
    return AuxiliaryEstimate(beta, float(np.dot(resid, resid) / n))


def ols_ar2_criterion(series: SeriesLike, beta) -> float:
    target, lag1, lag2, n = _design(series)
    resid = _residuals(target, lag1, lag2, np.asarray(beta, dtype=float))
    return float(np.dot(resid, resid) / n)


def ols_ar2_criterion_gradient(series: SeriesLike, beta) -> np.ndarray:
    """dQ/dbeta = (-2/T) * (sum y_{t-1} e_t, sum y_{t-2} e_t)."""
    target, lag1, lag2, n = _design(series)
    resid = _residuals(target, lag1, lag2, np.asarray(beta, dtype=float))
    return (-2.0 / n) * np.array([np.dot(lag1, resid), np.dot(lag2, resid)])
