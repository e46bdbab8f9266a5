"""
Statistic-augmentation sequences and the posterior jump diagnostic.

A plan is a chain of statistic sets, each a prefix-extension of the one before.
Every proposal is simulated once and summarised with the final (largest) set;
each step then selects its own columns, so only the statistics differ between
steps, never the draws.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from abc_engine.config import AbcConfig
from abc_engine.distances import quadratic_distances
from abc_engine.posterior import Posterior, PosteriorSummary, posterior_summaries
from abc_engine.samplers import posterior_from_distances, simulate_proposals
from abc_engine.summarisers import StatisticSummariser
from series_models.models import SeriesModel
from series_models.types import TimeSeries
from summaries.descriptors import StatisticSet, resolve_statistic_set
from utils.config_loader import load_config
from utils.exceptions import DomainError

logger = logging.getLogger(__name__)

PRESET_PLANS: Dict[str, Tuple[str, ...]] = {
    "moments-ladder": ("eta1", "eta2", "eta3", "eta4", "eta5"),
    "lags-ladder": ("eta1", "eta6", "eta7"),
    "lags-third-ladder": ("eta1", "eta6", "eta7", "eta8"),
}


@dataclass(eq=False)
class AugmentationPlan:
    """
    Nested statistic sets plus everything needed to run them.

    Attributes:
        name: Plan name used in reports
        model: Data-generating model
        sets: Statistic sets; each extends the previous one
        config: ABC settings shared by every step (same seed, same N)
        observed: Observed series; simulated from theta0 when None
        theta0: True parameter of a synthetic study
        series_length: Length of the synthetic observed series
    """

    name: str
    model: SeriesModel
    sets: List[StatisticSet]
    config: AbcConfig
    observed: Optional[TimeSeries] = None
    theta0: Optional[Sequence[float]] = None
    series_length: Optional[int] = None

    def __post_init__(self):
        self.sets = [resolve_statistic_set(s) for s in self.sets]
        if not self.sets:
            raise DomainError("An augmentation plan needs at least one statistic set")
        for prev, curr in zip(self.sets, self.sets[1:]):
            if not prev.is_prefix_of(curr):
                logger.error(f"Plan '{self.name}': {curr.name} does not extend {prev.name}")
                raise DomainError(
                    f"Statistic set '{curr.name}' {curr.tokens} does not extend '{prev.name}' {prev.tokens}"
                )
        if self.observed is None and (self.theta0 is None or self.series_length is None):
            raise DomainError("A plan needs an observed series or theta0 with a series length")

    @property
    def final_set(self) -> StatisticSet:
        return self.sets[-1]

    def observed_series(self) -> TimeSeries:
        """The observed series; synthetic plans draw it on the observed-data stream."""
        if self.observed is None:
            self.observed = self.model.observe(self.theta0, self.series_length, self.config.seed)
        return self.observed


def plan_from_preset(
    preset: str,
    model: SeriesModel,
    config: AbcConfig,
    theta0: Optional[Sequence[float]] = None,
    series_length: Optional[int] = None,
    observed: Optional[TimeSeries] = None
) -> AugmentationPlan:
    """
    Build one of the named plans (moments-ladder, lags-ladder, lags-third-ladder).

    Raises:
        DomainError: If the preset is unknown
    """
    if preset not in PRESET_PLANS:
        raise DomainError(f"Unknown augmentation plan '{preset}'; known: {sorted(PRESET_PLANS)}")
    return AugmentationPlan(preset, model, list(PRESET_PLANS[preset]), config, observed, theta0, series_length)


def _location(summary: PosteriorSummary) -> np.ndarray:
    return summary.mode if summary.mode is not None else summary.mean


def detect_jump(
    prev: PosteriorSummary,
    curr: PosteriorSummary,
    threshold: Optional[float] = None
) -> Tuple[float, bool]:
    """
    Mode shift between two posteriors in units of the earlier pooled std.

    The pooled std is the root mean of the previous step's coordinate
    variances. A zero pooled std gives +inf (flagged) when the modes differ
    and 0 (unflagged) when they coincide.

    Args:
        prev: Summary of the earlier step
        curr: Summary of the later step
        threshold: Flag level (config default 3.0)

    Returns:
        (jump_metric, jump_flag)

    Raises:
        DomainError: If the dimensions differ

    Example:
        >>> detect_jump(PosteriorSummary(m, s, m, 500), PosteriorSummary(m, s, m, 500))
        (0.0, False)
    """
    threshold = float(threshold if threshold is not None else load_config().get_jump_threshold())
    a, b = _location(prev), _location(curr)
    if a.shape != b.shape:
        raise DomainError(f"Posterior dimensions differ: {a.shape[0]} vs {b.shape[0]}")
    shift = float(np.linalg.norm(b - a))
    pooled = float(np.sqrt(np.mean(np.asarray(prev.std) ** 2)))
    if pooled == 0.0:
        return (np.inf, True) if shift > 0 else (0.0, False)
    metric = shift / pooled
    return metric, bool(metric > threshold)


@dataclass(eq=False)
class AugmentationStep:
    """One statistic set of a sequence and its posterior."""

    index: int
    statistics: str
    tolerance_used: float
    summary: PosteriorSummary
    jump_metric: Optional[float] = None
    jump_flag: Optional[bool] = None
    posterior: Optional[Posterior] = None

    @property
    def n_accepted(self) -> int:
        return self.summary.n_accepted


@dataclass(eq=False)
class AugmentationReport:
    """
    Per-step posterior summaries of a sequence with jump metrics.

    Attributes:
        plan_name: Name of the plan run
        steps: One entry per statistic set; the first has no jump entry
        threshold: Flag level used
        settled_at: Set from which no later step is flagged, reached by the
            last flagged jump; None when nothing settles
    """

    plan_name: str
    steps: List[AugmentationStep]
    threshold: float
    settled_at: Optional[str] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def flagged_transitions(self) -> List[Tuple[str, str]]:
        return [
            (self.steps[k - 1].statistics, self.steps[k].statistics)
            for k in range(1, len(self.steps)) if self.steps[k].jump_flag
        ]

    @property
    def jump_metrics(self) -> List[float]:
        return [s.jump_metric for s in self.steps[1:]]

    def to_frame(self) -> pd.DataFrame:
        """One row per step: tolerance, location and spread per coordinate, jump entries."""
        rows = []
        for step in self.steps:
            row = {
                "step": step.index,
                "statistics": step.statistics,
                "tolerance": step.tolerance_used,
                "n_accepted": step.n_accepted,
            }
            mode = _location(step.summary)
            for k in range(mode.shape[0]):
                row[f"mode{k + 1}"] = mode[k]
                row[f"mean{k + 1}"] = step.summary.mean[k]
                row[f"std{k + 1}"] = step.summary.std[k]
            row["jump_metric"] = step.jump_metric
            row["jump_flag"] = step.jump_flag
            rows.append(row)
        return pd.DataFrame(rows)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "plan": self.plan_name,
            "threshold": self.threshold,
            "settled_at": self.settled_at,
            "flagged": [list(t) for t in self.flagged_transitions],
            "steps": [
                {
                    "statistics": s.statistics,
                    "tolerance_used": s.tolerance_used,
                    "summary": s.summary.to_dict(),
                    "jump_metric": s.jump_metric,
                    "jump_flag": s.jump_flag,
                }
                for s in self.steps
            ],
            **self.metadata,
        }


def settled_at(steps: Sequence[AugmentationStep]) -> Optional[str]:
    """Set reached by the last flagged jump, provided at least one unflagged step follows it."""
    flagged = [k for k in range(1, len(steps)) if steps[k].jump_flag]
    if not flagged or flagged[-1] == len(steps) - 1:
        return None
    return steps[flagged[-1]].statistics


def run_augmentation_sequence(plan: AugmentationPlan, threshold: Optional[float] = None) -> AugmentationReport:
    """
    Run rejection ABC once per statistic set of a nested plan.

    Proposals are simulated once and summarised with the final set; each
    step takes the Euclidean distance over its own columns and applies the
    plan's tolerance rule, exactly as a separate run with the same seed would.

    Args:
        plan: Nested statistic sets, model, observed data and ABC settings
        threshold: Jump flag level (config default 3.0)

    Returns:
        AugmentationReport with per-step summaries, jump metrics and flags
    """
    threshold = float(threshold if threshold is not None else load_config().get_jump_threshold())
    config = plan.config
    observed = plan.observed_series()
    summariser = StatisticSummariser(plan.final_set, observed)
    logger.info(
        f"Augmentation plan '{plan.name}': {' -> '.join(s.name for s in plan.sets)}, "
        f"N={config.n_draws}, T={observed.length}"
    )

    batch = simulate_proposals(
        plan.model, summariser, config.n_draws, config.seed, observed.length, config.workers, config.chunk_size
    )
    observed_values = summariser.observed_values()

    steps: List[AugmentationStep] = []
    for index, stat_set in enumerate(plan.sets):
        columns = stat_set.columns_in(plan.final_set)
        distances = quadratic_distances(
            observed_values[columns], batch.summaries[:, columns], np.eye(columns.shape[0])
        )
        posterior = posterior_from_distances(batch.thetas, distances, config, plan.model.region_tag, stat_set.name)
        summary = posterior_summaries(posterior, config.kde_grid_points)
        step = AugmentationStep(index, stat_set.name, posterior.tolerance_used, summary, posterior=posterior)
        if steps:
            step.jump_metric, step.jump_flag = detect_jump(steps[-1].summary, summary, threshold)
            logger.info(
                f"{steps[-1].statistics} -> {stat_set.name}: jump metric {step.jump_metric:.3f}"
                f"{' (flagged)' if step.jump_flag else ''}"
            )
        steps.append(step)

    report = AugmentationReport(
        plan.name, steps, threshold, settled_at(steps),
        metadata={"failed_draws": batch.n_failed, "series_length": observed.length, "seed": config.seed},
    )
    logger.info(f"Plan '{plan.name}' flagged {report.flagged_transitions or 'no'} jumps; settled at {report.settled_at}")
    return report
