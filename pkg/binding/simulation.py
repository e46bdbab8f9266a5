"""
Simulation-based bindings and one-to-one verification.

A long trajectory at theta gives eta(z(theta)) ~ b(theta); batch means over
contiguous blocks of the same trajectory give a standard error per component.
"""

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial.distance import pdist

from series_models.models import SeriesModel
from series_models.types import ParameterVector
from summaries.descriptors import StatisticSet, evaluate_statistic_set, resolve_statistic_set
from summaries.types import SummaryVector
from utils.config_loader import load_config
from utils.exceptions import DomainError
from utils.parallel import parallel_map
from utils.rng import BINDING_STREAM

from .injectivity import InjectivityVerdict

logger = logging.getLogger(__name__)

MIN_T_STAR = 10 ** 4


@dataclass(eq=False)
class SimulatedBinding:
    """
    Long-run statistic value at one parameter.

    Attributes:
        summary: eta evaluated on the whole trajectory
        std_errors: Batch-means standard error per component (zeros for
            deterministic simulators)
    """

    summary: SummaryVector
    std_errors: np.ndarray
    theta: Optional[ParameterVector] = None

    @property
    def values(self) -> np.ndarray:
        return self.summary.values

    @property
    def combined_std_error(self) -> float:
        return float(np.sqrt(np.sum(self.std_errors ** 2)))


def simulate_binding(
    model: SeriesModel,
    theta,
    stat_set: Union[StatisticSet, str],
    t_star: int,
    seed: int,
    stream: Tuple[int, ...] = (),
    batch_count: Optional[int] = None
) -> SimulatedBinding:
    """
    Approximate b(theta) by one long simulated trajectory.

    Args:
        model: Data-generating model
        theta: Parameter inside the model's region
        stat_set: Statistic set (or name)
        t_star: Trajectory length, at least 10^4 (ignored by models with a fixed length)
        seed: Run seed
        stream: Stream path below the seed
        batch_count: Number of blocks for batch means (config default 50)

    Raises:
        DomainError: If t_star < 10^4 or theta is outside the region

    Example:
        >>> sim = simulate_binding(AR1Model(), 0.5, "acov1", 10**6, seed=3)
        >>> abs(sim.values[0] - 2 / 3) <= 3 * sim.std_errors[0]
        True
    """
    stat_set = resolve_statistic_set(stat_set)
    length = model.fixed_length
    if length is None:
        if int(t_star) < MIN_T_STAR:
            raise DomainError(f"t_star must be at least {MIN_T_STAR}, got {t_star}")
        length = int(t_star)
    batch_count = int(batch_count or load_config().get_binding_defaults()["batch_count"])

    series = model.simulate(theta, length, seed, tuple(stream))
    summary = evaluate_statistic_set(stat_set, series)
    if not model.is_stochastic:
        std_errors = np.zeros(summary.dimension)
    else:
        blocks = np.array_split(series.observations, batch_count, axis=0)
        block_values = np.vstack([stat_set.values(block) for block in blocks])
        std_errors = block_values.std(axis=0, ddof=1) / np.sqrt(batch_count)
    return SimulatedBinding(summary, std_errors, series.source.theta)


def _simulate_point(
    item: Tuple[int, np.ndarray],
    model: SeriesModel,
    stat_set: StatisticSet,
    t_star: int,
    seed: int
) -> SimulatedBinding:
    k, theta = item
    return simulate_binding(model, theta, stat_set, t_star, seed, (BINDING_STREAM, k))


def verify_one_to_one(
    model: SeriesModel,
    stat_set: Union[StatisticSet, str],
    theta_points: Sequence,
    t_star: int,
    seed: int,
    tau: Optional[float] = None,
    rho_min: Optional[float] = None,
    workers: int = 1
) -> InjectivityVerdict:
    """
    Simulate eta at K* distinct parameters and check the values are distinct.

    Pair (j, k) collides when ||eta_j - eta_k|| <= max(tau, 3 * sqrt(sum of
    both points' squared standard errors)). The witness is the collision with
    the smallest gap relative to its threshold.

    Args:
        model: Data-generating model
        stat_set: Statistic set (or name)
        theta_points: K* >= 2 parameters, pairwise at least rho_min apart
        t_star: Trajectory length per point
        seed: Run seed; point k uses the stream (BINDING_STREAM, k)
        tau: Collision floor (config default)
        rho_min: Required pairwise separation (config default)
        workers: joblib workers; the verdict does not depend on it

    Raises:
        DomainError: If fewer than two points are given or two lie closer than rho_min
    """
    settings = load_config().get_binding_defaults()
    tau = float(tau if tau is not None else settings["tau"])
    rho_min = float(rho_min if rho_min is not None else settings["rho_min"])
    stat_set = resolve_statistic_set(stat_set)
    points = np.vstack([model.region.as_rows(p)[0] for p in theta_points])
    if points.shape[0] < 2:
        raise DomainError(f"verify_one_to_one needs at least two parameter values, got {points.shape[0]}")
    separation = pdist(points)
    if np.min(separation) < rho_min:
        raise DomainError(f"Parameter values must be pairwise >= {rho_min} apart (closest pair {np.min(separation):.3g})")

    logger.info(
        f"One-to-one verification: model={model.name} statistics={stat_set.name} K*={points.shape[0]} T*={t_star}"
    )
    sims: List[SimulatedBinding] = parallel_map(
        _simulate_point, list(enumerate(points)), workers=workers,
        model=model, stat_set=stat_set, t_star=t_star, seed=seed
    )
    values = np.vstack([s.values for s in sims])
    variances = np.vstack([s.std_errors ** 2 for s in sims])

    collisions, ratios, gaps = [], [], []
    for j, k in combinations(range(points.shape[0]), 2):
        gap = float(np.linalg.norm(values[j] - values[k]))
        threshold = max(tau, 3.0 * float(np.sqrt(np.sum(variances[j] + variances[k]))))
        if gap <= threshold:
            collisions.append((j, k))
            ratios.append(gap / threshold)
            gaps.append(gap)

    region = model.region
    pairs = [(region.vector(points[j]), region.vector(points[k])) for j, k in collisions]
    verdict = InjectivityVerdict(
        not collisions, None, points.shape[0], rho_min, tau, "simulation",
        candidates=len(collisions), binding_name=f"{model.name}:{stat_set.name}", collisions=pairs,
    )
    if collisions:
        best = int(np.argmin(ratios))
        verdict.witness = pairs[best]
        verdict.witness_gap = gaps[best]
        logger.info(
            f"Not one-to-one: {len(collisions)} colliding pairs, witness {pairs[best][0].values} / {pairs[best][1].values}"
        )
    else:
        logger.info(f"All {points.shape[0]} simulated statistic vectors are distinct")
    return verdict
