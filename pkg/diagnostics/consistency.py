"""
Consistency sweeps: posterior concentration around the truth as T grows.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from abc_engine.config import AbcConfig
from abc_engine.distances import DistanceSpec
from abc_engine.posterior import Posterior, concentration_probability
from abc_engine.samplers import run_kernel_abc, run_rejection_abc
from series_models.models import SeriesModel
from series_models.types import ParameterVector
from summaries.descriptors import StatisticSet, evaluate_statistic_set, resolve_statistic_set
from utils.exceptions import DomainError

logger = logging.getLogger(__name__)

SAMPLERS = ("rejection", "kernel")


@dataclass(eq=False)
class ConsistencyProbe:
    """
    Pr(||theta - theta0|| >= delta | eta(y)) per sample size.

    Attributes:
        delta: Neighbourhood radius
        sizes: Sample sizes T, ascending
        probabilities: Empirical probability outside the delta-neighbourhood, per T
        std_errors: Binomial Monte Carlo error of each probability
        posterior_stds: Posterior standard deviation per coordinate, per T
        observed_statistics: eta(y) of each observed series
        posteriors: Posterior per T, kept for density export
        no_acceptances: Whether the run at each T accepted nothing; its
            probability, standard error and stds are NaN
    """

    delta: float
    sizes: List[int]
    probabilities: List[float]
    std_errors: List[float]
    posterior_stds: List[np.ndarray]
    statistics: str
    theta0: ParameterVector
    observed_statistics: List[np.ndarray] = field(default_factory=list)
    posteriors: List[Posterior] = field(default_factory=list)
    no_acceptances: List[bool] = field(default_factory=list)

    def __post_init__(self):
        if any(not 0.0 <= p <= 1.0 for p in self.probabilities if not np.isnan(p)):
            raise DomainError("Probe probabilities must lie in [0, 1]")

    def is_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.probabilities, self.probabilities[1:]))

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for k, size in enumerate(self.sizes):
            row = {
                "T": size,
                "probability": self.probabilities[k],
                "std_error": self.std_errors[k],
                "n_accepted": self.posteriors[k].n_accepted if self.posteriors else None,
                "no_acceptances": self.no_acceptances[k] if self.no_acceptances else False,
            }
            for j, s in enumerate(self.posterior_stds[k]):
                row[f"std{j + 1}"] = s
            rows.append(row)
        return pd.DataFrame(rows)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "statistics": self.statistics,
            "theta0": list(self.theta0.values),
            "delta": self.delta,
            "sizes": list(self.sizes),
            "probabilities": list(self.probabilities),
            "std_errors": list(self.std_errors),
            "posterior_stds": [np.asarray(s).tolist() for s in self.posterior_stds],
            "no_acceptances": list(self.no_acceptances),
        }


def consistency_sweep(
    model: SeriesModel,
    theta0,
    stat_set: Union[StatisticSet, str],
    sizes: Sequence[int],
    delta: float,
    config: AbcConfig,
    distance: Optional[DistanceSpec] = None,
    sampler: str = "rejection"
) -> ConsistencyProbe:
    """
    Fresh observed data and a full ABC run at every sample size.

    The observed series for size T is drawn at theta0 on the stream
    (seed, OBSERVED_STREAM, T), so every size is an independent experiment.

    Args:
        model: Data-generating model
        theta0: True parameter
        stat_set: Statistic set (or name)
        sizes: Strictly ascending sample sizes
        delta: Neighbourhood radius, > 0
        config: ABC settings; kernel sampling uses ``config.epsilon`` as bandwidth
        distance: Distance of the rejection sampler (euclidean by default)
        sampler: "rejection" or "kernel"

    Returns:
        ConsistencyProbe

    Raises:
        DomainError: If sizes are not strictly ascending, delta <= 0, or the sampler is unknown

    Example:
        >>> probe = consistency_sweep(MA2Model(), (0.6, 0.2), "eta2", [100, 500, 5000], 0.1, cfg)
        >>> probe.is_decreasing()
        True
    """
    sizes = [int(t) for t in sizes]
    if not sizes or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise DomainError(f"Sample sizes must be strictly ascending, got {sizes}")
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    if sampler not in SAMPLERS:
        raise DomainError(f"Unknown sampler '{sampler}'; expected one of {SAMPLERS}")
    if sampler == "kernel" and config.epsilon is None:
        raise DomainError("Kernel sampling needs an absolute epsilon (the kernel bandwidth)")
    stat_set = resolve_statistic_set(stat_set)
    theta0 = theta0 if isinstance(theta0, ParameterVector) else model.region.vector(theta0)
    logger.info(f"Consistency sweep: model={model.name} statistics={stat_set.name} sizes={sizes} delta={delta:g}")

    probe = ConsistencyProbe(float(delta), sizes, [], [], [], stat_set.name, theta0)
    for size in sizes:
        observed = model.observe(theta0, size, config.seed, size)
        if sampler == "kernel":
            posterior = run_kernel_abc(observed, model, stat_set, config.epsilon, config)
        else:
            posterior = run_rejection_abc(observed, model, stat_set, distance, config)
        probe.observed_statistics.append(evaluate_statistic_set(stat_set, observed).values)
        probe.posteriors.append(posterior)
        probe.no_acceptances.append(posterior.n_accepted == 0)
        if posterior.n_accepted == 0:
            probe.probabilities.append(float("nan"))
            probe.std_errors.append(float("nan"))
            probe.posterior_stds.append(np.full(model.region.dim, np.nan))
            logger.warning(f"T={size}: no accepted draws; probability recorded as NaN")
            continue
        probability = concentration_probability(posterior, theta0, delta)
        probe.probabilities.append(probability)
        probe.std_errors.append(float(np.sqrt(probability * (1.0 - probability) / posterior.n_accepted)))
        probe.posterior_stds.append(posterior.thetas.std(axis=0))
        logger.info(f"T={size}: Pr(outside {delta:g}-ball)={probability:.4f} ({posterior.n_accepted} accepted)")
    return probe
