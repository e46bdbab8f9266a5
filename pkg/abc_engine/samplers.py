"""
Rejection and kernel ABC samplers.

Proposals are simulated in contiguous index chunks on the joblib pool. Draw
``i`` depends only on ``(seed, i)``; the posterior is assembled in draw-index
order, so results do not change with the worker count.
"""

import logging
import time
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from series_models.models import SeriesModel
from series_models.types import TimeSeries
from summaries.descriptors import StatisticSet, resolve_statistic_set
from utils.exceptions import AbcToolkitError, DomainError
from utils.parallel import chunk_indices, parallel_map
from utils.rng import ACCEPT_STREAM, make_generator

from .config import AbcConfig, quantile_count
from .distances import DistanceSpec, quadratic_distances
from .posterior import Posterior
from .summarisers import Summariser, build_summariser

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class ProposalBatch:
    """
    All N proposals of a run.

    Attributes:
        thetas: Prior draws, shape (N, p)
        summaries: Summariser output per draw, shape (N, d); NaN rows mark failed draws
    """

    thetas: np.ndarray
    summaries: np.ndarray

    @property
    def n_failed(self) -> int:
        return int(np.sum(~np.all(np.isfinite(self.summaries), axis=1)))


def _simulate_chunk(
    indices: np.ndarray,
    model: SeriesModel,
    summariser: Summariser,
    seed: int,
    length: Optional[int]
) -> Tuple[np.ndarray, np.ndarray]:
    thetas, paths = model.propose(indices, seed, length)
    summaries = np.full((len(indices), summariser.dimension), np.nan)
    for row, path in enumerate(paths):
        if not np.all(np.isfinite(path)):
            continue
        try:
            summaries[row] = summariser.summarise(path)
        except AbcToolkitError as e:
            logger.debug(f"Draw {int(indices[row])} could not be summarised: {e}")
    return thetas, summaries


def simulate_proposals(
    model: SeriesModel,
    summariser: Summariser,
    n_draws: int,
    seed: int,
    length: Optional[int],
    workers: int = 1,
    chunk_size: int = 256
) -> ProposalBatch:
    """
    Draw N prior values, simulate each and summarise the simulated paths.

    Draws whose simulation or summary fails (LV blow-up, singular OLS design)
    keep a NaN summary row and end up with an infinite distance.
    """
    chunks = chunk_indices(int(n_draws), chunk_size)
    results = parallel_map(
        _simulate_chunk, chunks, workers=workers,
        model=model, summariser=summariser, seed=seed, length=length
    )
    batch = ProposalBatch(
        np.concatenate([r[0] for r in results]),
        np.concatenate([r[1] for r in results]),
    )
    if batch.n_failed:
        logger.warning(f"{batch.n_failed} of {n_draws} proposals failed to simulate or summarise; given infinite distance")
    return batch


def batch_distances(batch_summaries: np.ndarray, summariser: Summariser, distance: DistanceSpec) -> Tuple[np.ndarray, DistanceSpec]:
    """Distances of every proposal, calibrating a weighted distance on the batch first."""
    if distance.works_on_paths:
        d = batch_summaries[:, 0].copy()
        d[~np.isfinite(d)] = np.inf
        return d, distance
    distance = distance.calibrated(batch_summaries)
    weight = distance.quadratic_weight(batch_summaries.shape[1])
    return quadratic_distances(summariser.observed_values(), batch_summaries, weight), distance


def select_quantile_tolerance(distances: Sequence[float], q: float) -> float:
    """
    The ceil(q N)-th smallest distance.

    Example:
        >>> select_quantile_tolerance(np.arange(1, 101), 0.10)
        10.0
    """
    distances = np.asarray(distances, dtype=float)
    if distances.size == 0:
        raise DomainError("Cannot pick a tolerance from no distances")
    if not 0.0 < q < 1.0:
        raise DomainError(f"quantile must lie strictly inside (0, 1), got {q}")
    k = quantile_count(q, distances.size)
    return float(np.sort(distances, kind="stable")[k - 1])


def accept_draws(distances: np.ndarray, config: AbcConfig) -> Tuple[np.ndarray, float]:
    """
    Indices of accepted draws (ascending) and the tolerance used.

    Quantile mode keeps exactly ceil(q N) draws, ties broken by draw index.
    """
    if config.quantile is not None:
        k = quantile_count(config.quantile, distances.size)
        order = np.argsort(distances, kind="stable")
        accepted = np.sort(order[:k])
        return accepted, float(distances[order[k - 1]])
    accepted = np.flatnonzero(distances <= config.epsilon)
    return accepted, float(config.epsilon)


def _resolve_length(observed: TimeSeries, config: AbcConfig) -> int:
    if config.series_length is not None and int(config.series_length) != observed.length:
        raise DomainError(
            f"Simulated length {config.series_length} differs from the observed length {observed.length}"
        )
    return observed.length


def posterior_from_distances(
    thetas: np.ndarray,
    distances: np.ndarray,
    config: AbcConfig,
    region_tag: str,
    statistics: str
) -> Posterior:
    """Apply the tolerance rule of ``config`` to precomputed distances."""
    accepted, tolerance = accept_draws(distances, config)
    posterior = Posterior(
        thetas[accepted], distances[accepted], accepted, tolerance, int(distances.size), region_tag,
        method="rejection", statistics=statistics,
        metadata={"tolerance_mode": config.tolerance_mode, "seed": config.seed},
    )
    if posterior.no_acceptances:
        logger.warning(f"No proposal came within epsilon={config.epsilon:g} ({statistics}); posterior is empty")
    return posterior


def run_rejection_abc(
    observed: TimeSeries,
    model: SeriesModel,
    statistics: Optional[Union[StatisticSet, str, list]],
    distance: Optional[DistanceSpec],
    config: AbcConfig
) -> Posterior:
    """
    Accept/reject ABC.

    Args:
        observed: Observed series
        model: Data-generating model supplying prior and simulator
        statistics: Statistic set (or name); None for the raw-path and score distances
        distance: Distance spec; euclidean when None
        config: Draw count, tolerance rule, seed and parallelism

    Returns:
        Posterior; with an absolute tolerance that no draw meets it is empty and
        flagged ``no_acceptances``

    Example:
        >>> cfg = AbcConfig(n_draws=50000, seed=1, quantile=0.01)
        >>> post = run_rejection_abc(y, MA2Model(), "eta2", None, cfg)
    """
    distance = distance or DistanceSpec("euclidean")
    length = _resolve_length(observed, config)
    summariser = build_summariser(statistics, distance, observed)
    started = time.perf_counter()
    logger.info(
        f"Rejection ABC: model={model.name} statistics={summariser.name} distance={distance.kind} "
        f"N={config.n_draws} {config.tolerance_mode}={config.quantile if config.quantile is not None else config.epsilon}"
    )

    batch = simulate_proposals(model, summariser, config.n_draws, config.seed, length, config.workers, config.chunk_size)
    distances, distance = batch_distances(batch.summaries, summariser, distance)
    posterior = posterior_from_distances(batch.thetas, distances, config, model.region_tag, summariser.name)
    posterior.metadata.update({
        "distance": distance.describe(),
        "failed_draws": batch.n_failed,
        "min_distance": float(np.min(distances)),
    })
    logger.info(
        f"Accepted {posterior.n_accepted}/{config.n_draws} at tolerance {posterior.tolerance_used:.6g} "
        f"in {time.perf_counter() - started:.1f}s"
    )
    return posterior


def kernel_acceptance_probability(u, epsilon: float) -> np.ndarray:
    """exp(-u^2 / epsilon^2): the smoothing kernel divided by its value at zero."""
    if not epsilon > 0:
        raise DomainError(f"Kernel bandwidth must be positive, got {epsilon}")
    u = np.asarray(u, dtype=float)
    return np.exp(-(u * u) / (epsilon * epsilon))


def _acceptance_uniforms(seed: int, n: int) -> np.ndarray:
    return np.array([make_generator(seed, ACCEPT_STREAM, i).random() for i in range(n)])


def run_kernel_abc(
    observed: TimeSeries,
    model: SeriesModel,
    stat: Union[StatisticSet, str],
    epsilon: float,
    config: AbcConfig
) -> Posterior:
    """
    Kernel-accept ABC with a scalar statistic.

    Draw i is kept when U_i < exp(-(eta(y) - eta(z_i))^2 / epsilon^2), with
    U_i uniform on the stream (seed, ACCEPT_STREAM, i).

    Raises:
        DomainError: If epsilon <= 0 or the statistic is not scalar
    """
    if not epsilon > 0:
        raise DomainError(f"Kernel bandwidth must be positive, got {epsilon}")
    stat_set = resolve_statistic_set(stat)
    if stat_set.dimension != 1:
        raise DomainError(f"Kernel ABC needs a scalar statistic, '{stat_set.name}' has dimension {stat_set.dimension}")
    length = _resolve_length(observed, config)
    summariser = build_summariser(stat_set, DistanceSpec("euclidean"), observed)
    logger.info(f"Kernel ABC: model={model.name} statistic={stat_set.name} epsilon={epsilon:g} N={config.n_draws}")

    batch = simulate_proposals(model, summariser, config.n_draws, config.seed, length, config.workers, config.chunk_size)
    u = np.abs(batch.summaries[:, 0] - summariser.observed_values()[0])
    u[~np.isfinite(u)] = np.inf
    probabilities = kernel_acceptance_probability(u, epsilon)
    accepted = np.flatnonzero(_acceptance_uniforms(config.seed, config.n_draws) < probabilities)
    tolerance = float(u[accepted].max()) if accepted.size else 0.0

    posterior = Posterior(
        batch.thetas[accepted], u[accepted], accepted, tolerance, config.n_draws, model.region_tag,
        method="kernel", statistics=stat_set.name, bandwidth=float(epsilon),
        metadata={"seed": config.seed, "failed_draws": batch.n_failed},
    )
    logger.info(f"Kernel ABC accepted {posterior.n_accepted}/{config.n_draws}")
    return posterior
