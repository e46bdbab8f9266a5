"""
Moment statistics.

Autocovariances are non-centred with divisor T for every lag:
    eta_j(y) = (1/T) * sum_{t=j+1..T} y_t * y_{t-j}
"""

import logging
from typing import Union

import numpy as np

from series_models.types import TimeSeries
from utils.exceptions import DomainError

from .types import SummaryVector

logger = logging.getLogger(__name__)

SeriesLike = Union[TimeSeries, np.ndarray]


def as_scalar_array(series: SeriesLike) -> np.ndarray:
    y = series.observations if isinstance(series, TimeSeries) else np.asarray(series, dtype=float)
    if y.ndim != 1:
        raise DomainError(f"Expected a scalar series, got shape {y.shape}")
    if y.shape[0] == 0:
        raise DomainError("Statistic of an empty series")
    return y


def as_bivariate_array(series: SeriesLike) -> np.ndarray:
    x = series.observations if isinstance(series, TimeSeries) else np.asarray(series, dtype=float)
    if x.ndim != 2 or x.shape[1] != 2:
        raise DomainError(f"Expected a bivariate series, got shape {x.shape}")
    return x


def autocov(series: SeriesLike, lag: int) -> float:
    """
    Non-centred lag autocovariance with divisor T.

    Raises:
        DomainError: If lag < 0 or lag >= T
    """
    y = as_scalar_array(series)
    n = y.shape[0]
    lag = int(lag)
    if lag < 0 or lag >= n:
        raise DomainError(f"Autocovariance lag {lag} needs 0 <= lag < T={n}")
    return float(np.dot(y[lag:], y[:n - lag]) / n)


def sample_mean(series: SeriesLike) -> float:
    return float(np.mean(as_scalar_array(series)))


def sample_third_moment(series: SeriesLike) -> float:
    """(1/T) * sum of y_t^3."""
    y = as_scalar_array(series)
    return float(np.mean(y * y * y))


def lv_olstats(series: SeriesLike) -> SummaryVector:
    """
    Closed-form minimisers of the LV OLS criterion.

    Returns:
        (mean x1, mean x2, var x1, var x2), variances with divisor R_T
    """
    x = as_bivariate_array(series)
    if x.shape[0] < 2:
        raise DomainError("LV statistics need at least two observations")
    means = x.mean(axis=0)
    variances = x.var(axis=0)
    return SummaryVector(
        np.concatenate([means, variances]), "lv_olstats", x.shape[0],
        ("lv_mean1", "lv_mean2", "lv_var1", "lv_var2"),
    )
