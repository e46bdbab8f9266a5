"""
Summarisers turn a simulated raw path into the vector the distance compares.

Each summariser is bound to the observed series once, so per-draw work is a
single ``summarise`` call inside the worker pool.
"""

import logging
from abc import ABC, abstractmethod
from typing import Optional, Union

import numpy as np

from series_models.types import TimeSeries
from summaries.descriptors import StatisticSet, resolve_statistic_set
from summaries.ols import ols_ar2_criterion_gradient, ols_ar2_estimate
from utils.exceptions import DomainError

from .distances import DistanceSpec, lv_raw_path_distance

logger = logging.getLogger(__name__)


class Summariser(ABC):
    """Base class: maps a raw path to a fixed-length vector."""

    name = "summary"
    dimension = 1

    @abstractmethod
    def observed_values(self) -> np.ndarray:
        """Summary of the observed series."""

    @abstractmethod
    def summarise(self, path: np.ndarray) -> np.ndarray:
        """Summary of one simulated raw path."""


class StatisticSummariser(Summariser):
    """Evaluates a StatisticSet on every path."""

    def __init__(self, stat_set: StatisticSet, observed: TimeSeries):
        self.stat_set = stat_set
        self.name = stat_set.name
        self.dimension = stat_set.dimension
        self._observed = stat_set.values(observed.observations)

    def observed_values(self) -> np.ndarray:
        return self._observed

    def summarise(self, path: np.ndarray) -> np.ndarray:
        return self.stat_set.values(path)


class ScoreSummariser(Summariser):
    """Gradient of the AR(2) OLS criterion of each path at beta_hat(observed)."""

    name = "score_ols_ar2"
    dimension = 2

    def __init__(self, observed: TimeSeries):
        self.beta_hat = ols_ar2_estimate(observed).beta
        logger.info(f"Score distance anchored at beta_hat={np.round(self.beta_hat, 6).tolist()}")

    def observed_values(self) -> np.ndarray:
        return np.zeros(2)

    def summarise(self, path: np.ndarray) -> np.ndarray:
        return ols_ar2_criterion_gradient(path, self.beta_hat)


class RawPathSummariser(Summariser):
    """Returns the raw-path distance itself as a one-component vector."""

    name = "raw_path"
    dimension = 1

    def __init__(self, observed: TimeSeries):
        if not observed.is_bivariate:
            raise DomainError("The raw-path distance needs a bivariate observed series")
        self._observed = np.array(observed.observations)

    def observed_values(self) -> np.ndarray:
        return np.zeros(1)

    def summarise(self, path: np.ndarray) -> np.ndarray:
        with np.errstate(invalid="ignore", over="ignore"):
            return np.array([lv_raw_path_distance(self._observed, path)])


def build_summariser(
    statistics: Optional[Union[StatisticSet, str, list]],
    distance: DistanceSpec,
    observed: TimeSeries
) -> Summariser:
    """
    Pick the summariser matching a statistic choice and a distance.

    Raises:
        DomainError: If the combination makes no sense
    """
    if distance.kind == "lv_raw_path":
        if statistics not in (None, "raw_path"):
            raise DomainError("The raw-path distance compares whole paths; pass no statistic set")
        return RawPathSummariser(observed)
    if distance.kind == "score_ols_ar2":
        if statistics is not None:
            stat_set = resolve_statistic_set(statistics)
            if stat_set.tokens != ["ols_ar2"]:
                raise DomainError("The score distance belongs to the AR(2) OLS criterion (statistics 'ols_ar2')")
        return ScoreSummariser(observed)
    if statistics is None:
        raise DomainError(f"Distance '{distance.kind}' needs a statistic set")
    return StatisticSummariser(resolve_statistic_set(statistics), observed)
