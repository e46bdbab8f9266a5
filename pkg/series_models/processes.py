"""
Scalar time-series simulators: AR(1), MA(2) and i.i.d. Gaussian.

The ``*_path`` functions draw from a caller-supplied generator and return bare
arrays (used inside the samplers); the ``simulate_*`` functions validate their
inputs, seed a generator and wrap the result in a TimeSeries.
"""

import logging
from typing import Union

import numpy as np
from scipy.signal import lfilter

from utils.exceptions import DomainError
from utils.rng import make_generator

from .regions import get_region
from .types import ParameterVector, SeriesSource, TimeSeries

logger = logging.getLogger(__name__)

ThetaLike = Union[ParameterVector, np.ndarray, float, tuple, list]


def _check_length(length: int, minimum: int, model: str) -> int:
    length = int(length)
    if length < minimum:
        raise DomainError(f"{model} series length must be >= {minimum}, got {length}")
    return length


def ar1_path(theta: float, length: int, rng: np.random.Generator) -> np.ndarray:
    """
    y_t = theta * y_{t-1} + nu_t with y_0 drawn from N(0, 1 / (1 - theta^2)).

    Innovations are drawn before y_0, so theta = 0 returns the raw innovation
    stream of the generator.
    """
    innovations = rng.standard_normal(length)
    y0 = rng.standard_normal() / np.sqrt(1.0 - theta * theta)
    if theta == 0.0:
        return innovations
    path, _ = lfilter([1.0], [1.0, -theta], innovations, zi=[theta * y0])
    return path


def ma2_path(theta1: float, theta2: float, length: int, rng: np.random.Generator) -> np.ndarray:
    """y_t = e_t + theta1 e_{t-1} + theta2 e_{t-2}, with two burn-in innovations."""
    e = rng.standard_normal(length + 2)
    return e[2:] + theta1 * e[1:-1] + theta2 * e[:-2]


def iid_normal_path(mean: float, length: int, rng: np.random.Generator) -> np.ndarray:
    return mean + rng.standard_normal(length)


def _as_vector(theta: ThetaLike, tag: str) -> ParameterVector:
    if isinstance(theta, ParameterVector):
        return theta
    return ParameterVector.of(theta, tag)


def simulate_ar1(theta: ThetaLike, length: int, seed: int) -> TimeSeries:
    """
    Simulate a stationary AR(1) series.

    Args:
        theta: Autoregressive coefficient, |theta| < 1
        length: Series length T >= 2
        seed: Non-negative integer seed

    Returns:
        TimeSeries recording (theta, seed) as its source

    Raises:
        DomainError: If |theta| >= 1 or the length is too short
    """
    vector = _as_vector(theta, "ar1")
    value = get_region("ar1").validate(vector)[0]
    length = _check_length(length, 2, "AR(1)")
    path = ar1_path(float(value), length, make_generator(seed))
    return TimeSeries(path, SeriesSource("simulated", vector, seed))


def simulate_ma2(theta: ThetaLike, length: int, seed: int) -> TimeSeries:
    """
    Simulate an MA(2) series.

    Raises:
        DomainError: If theta violates the invertibility constraints or T < 3
    """
    vector = _as_vector(theta, "ma2")
    t1, t2 = get_region("ma2").validate(vector)
    length = _check_length(length, 3, "MA(2)")
    path = ma2_path(float(t1), float(t2), length, make_generator(seed))
    return TimeSeries(path, SeriesSource("simulated", vector, seed))


def simulate_iid_normal(mean: float, length: int, seed: int) -> TimeSeries:
    """Simulate i.i.d. N(mean, 1) draws."""
    length = _check_length(length, 1, "i.i.d. normal")
    vector = ParameterVector.of(mean, "gaussian_mean")
    path = iid_normal_path(float(mean), length, make_generator(seed))
    return TimeSeries(path, SeriesSource("simulated", vector, seed))
