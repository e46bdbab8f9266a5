"""
Command runners behind the CLI subcommands.

Each runner takes a merged ExperimentConfig, writes its CSV/JSON outputs
plus the observed series into the run directory, and returns the manifest.
"""

import logging
from typing import Any, Dict, List

import numpy as np
import pandas as pd
from scipy.stats import norm

from abc_engine.distances import DistanceSpec
from abc_engine.posterior import Posterior, kde_marginal, posterior_summaries
from abc_engine.samplers import run_rejection_abc
from analytic_gaussian.pseudo_posterior import ORDERS, pseudo_posterior_params, sequential_limit_sweep
from binding.functions import binding_for
from binding.injectivity import check_injectivity_analytic
from binding.preimage import solve_preimage
from binding.simulation import verify_one_to_one
from diagnostics.augmentation import PRESET_PLANS, AugmentationPlan, run_augmentation_sequence
from diagnostics.consistency import consistency_sweep
from series_models.models import LotkaVolterraModel, SeriesModel, default_lv_config, get_model
from series_models.regions import Region
from series_models.types import TimeSeries
from utils.config_loader import load_config
from utils.exceptions import ConfigError, DomainError, EmptyPosteriorError

from .config import RAW_PATH, ExperimentConfig, parse_bounds, statistic_choice
from .manifest import RunManifest, RunRecorder

logger = logging.getLogger(__name__)


def build_model(cfg: ExperimentConfig) -> SeriesModel:
    if cfg.model in ("lotka_volterra", "lv"):
        lv_config = default_lv_config(n_points=cfg.n_points)
        if cfg.theta0 is not None:
            lv_config = lv_config.with_theta(cfg.theta0)
        return LotkaVolterraModel(lv_config, cfg.mode)
    return get_model(cfg.model)


def _require(value, name: str):
    if value is None or (isinstance(value, (list, tuple)) and not value):
        raise ConfigError(f"This experiment needs '{name}'", field=name)
    return value


def _recorder(cfg: ExperimentConfig) -> RunRecorder:
    return RunRecorder(cfg.out, cfg.experiment, cfg.command, cfg.to_dict())


def _workers(cfg: ExperimentConfig) -> int:
    return int(cfg.workers or load_config().get_default_workers())


def _write_observed(recorder: RunRecorder, name: str, observed: TimeSeries) -> None:
    recorder.frame(name, observed.to_frame())


def _write_posterior(recorder: RunRecorder, label: str, posterior: Posterior, grid_points: int) -> Dict[str, Any]:
    """Posterior draws, one KDE file per coordinate, and the summary dict."""
    recorder.frame(f"posterior_{label}.csv", posterior.to_frame())
    entry: Dict[str, Any] = {"posterior": posterior.to_dict()}
    try:
        entry["summary"] = posterior_summaries(posterior, grid_points).to_dict()
        for k in range(posterior.dim):
            kde = kde_marginal(posterior, k, grid_points=grid_points)
            recorder.frame(f"kde_{label}_theta{k + 1}.csv", kde.to_frame())
    except (EmptyPosteriorError, DomainError) as e:
        logger.warning(f"No density written for {label}: {e}")
    return entry


def cmd_abc_run(cfg: ExperimentConfig) -> RunManifest:
    """
    Rejection (or kernel) ABC for every statistic set and distance at every sample size.

    Outputs per (set, distance, T): posterior CSV and KDE CSVs; per (set,
    distance): a consistency table; per T: the observed series; plus
    ``summary.json``. Kernel runs of the Gaussian-mean model also get the
    closed-form pseudo-posterior density on the KDE grid.
    """
    sizes = _require(cfg.run_sizes, "sizes")
    theta0 = _require(cfg.theta0, "theta0")
    stat_names = _require(cfg.statistic_sets, "statistic_sets")
    model = build_model(cfg)
    delta = float(cfg.delta if cfg.delta is not None else load_config().get_analytic_defaults()["delta"])
    config = cfg.abc_config()
    recorder = _recorder(cfg)

    for size in sizes:
        _write_observed(recorder, f"observed_T{size}.csv", model.observe(theta0, size, cfg.seed, size))

    runs: List[Dict[str, Any]] = []
    for stat in stat_names:
        for kind in cfg.distances:
            label = stat if kind == "euclidean" else f"{stat}_{kind}"
            probe = consistency_sweep(model, theta0, stat, sizes, delta, config, DistanceSpec(kind), cfg.sampler)
            recorder.frame(f"consistency_{label}.csv", probe.to_frame())
            per_size = []
            for size, posterior, eta_y in zip(sizes, probe.posteriors, probe.observed_statistics):
                entry = _write_posterior(recorder, f"{label}_T{size}", posterior, config.kde_grid_points)
                entry["T"] = size
                if posterior.no_acceptances:
                    recorder.manifest.empty_posteriors.append(f"{label}_T{size}")
                if cfg.sampler == "kernel" and cfg.model == "gaussian_mean" and posterior.n_accepted >= 2:
                    recorder.frame(f"overlay_{label}_T{size}.csv", _kernel_overlay(posterior, float(eta_y[0]), size, cfg.epsilon))
                per_size.append(entry)
            runs.append({"statistics": stat, "distance": kind, "consistency": probe.to_dict(), "runs": per_size})

    recorder.json("summary.json", {"experiment": cfg.experiment, "runs": runs})
    return recorder.finish()


def _kernel_overlay(posterior: Posterior, eta_y: float, size: int, epsilon: float) -> pd.DataFrame:
    kde = kde_marginal(posterior, 0)
    post = pseudo_posterior_params(eta_y, size, epsilon)
    return pd.DataFrame({
        "grid": kde.grid,
        "kde": kde.density,
        "analytic": norm.pdf(kde.grid, loc=post.mean, scale=post.std),
    })


def cmd_diagnose_augment(cfg: ExperimentConfig) -> RunManifest:
    """Nested statistic sets on one observed series; jump table, report JSON and per-step densities."""
    sets = cfg.statistic_sets or list(PRESET_PLANS.get(cfg.plan or cfg.experiment, ()))
    _require(sets, "statistic_sets")
    size = _require(cfg.size or (cfg.run_sizes[0] if cfg.run_sizes else None), "size")
    model = build_model(cfg)
    plan = AugmentationPlan(
        cfg.experiment, model, sets, cfg.abc_config(), theta0=_require(cfg.theta0, "theta0"), series_length=int(size)
    )
    recorder = _recorder(cfg)
    _write_observed(recorder, "observed.csv", plan.observed_series())

    report = run_augmentation_sequence(plan, cfg.threshold)
    recorder.frame("augmentation.csv", report.to_frame())
    for step in report.steps:
        _write_posterior(recorder, f"step{step.index + 1}_{step.statistics}", step.posterior, plan.config.kde_grid_points)
    recorder.json("augmentation.json", report.to_dict())
    return recorder.finish()


def verification_points(region: Region, bounds, per_dimension: int) -> np.ndarray:
    """Evenly spaced grid over ``bounds`` restricted to the region."""
    axes = [np.linspace(lo, hi, per_dimension) for lo, hi in bounds]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.column_stack([m.ravel() for m in mesh])
    return points[region.contains(points)]


def cmd_diagnose_injectivity(cfg: ExperimentConfig) -> RunManifest:
    """Analytic grid verdict, preimage of b(theta0), and optionally the simulated verification."""
    stat = _require(cfg.statistic_sets, "statistic_sets")[0]
    binding = binding_for(cfg.model, stat)
    bounds = parse_bounds(cfg.bounds)
    recorder = _recorder(cfg)

    verdict = check_injectivity_analytic(binding, bounds, cfg.rho_min, cfg.tau)
    payload: Dict[str, Any] = {"binding": binding.name, "components": list(binding.components), "analytic": verdict.to_dict()}
    if cfg.theta0 is not None:
        payload["preimage"] = solve_preimage(binding, binding(cfg.theta0)).to_dict()

    if cfg.verify_points > 0:
        model = build_model(cfg)
        box = parse_bounds(cfg.verify_bounds) or bounds or model.region.prior_box
        points = verification_points(model.region, box, int(cfg.verify_points))
        simulated = verify_one_to_one(
            model, stat, points, int(cfg.t_star), cfg.seed, cfg.tau, cfg.rho_min, workers=_workers(cfg)
        )
        payload["simulation"] = simulated.to_dict()
        if simulated.collisions:
            recorder.frame("collisions.csv", pd.DataFrame([
                {**{f"a{k + 1}": v for k, v in enumerate(a.values)}, **{f"b{k + 1}": v for k, v in enumerate(b.values)}}
                for a, b in simulated.collisions
            ]))

    recorder.json("injectivity.json", payload)
    return recorder.finish()


def cmd_analytic_sweep(cfg: ExperimentConfig) -> RunManifest:
    """Both limit orders of the Gaussian-mean tail probability; one table plus per-order verdicts."""
    recorder = _recorder(cfg)
    theta0 = cfg.theta0[0] if isinstance(cfg.theta0, list) else cfg.theta0
    results = [
        sequential_limit_sweep(
            order, theta0, cfg.delta, cfg.epsilon_grid, cfg.size_grid, seed=cfg.seed, eta_mode=cfg.eta_mode
        )
        for order in cfg.orders or ORDERS
    ]
    recorder.frame("sweep.csv", pd.concat([r.to_frame() for r in results], ignore_index=True))
    recorder.json("sweep.json", {r.order: r.to_dict() for r in results})
    return recorder.finish()


def cmd_lv_study(cfg: ExperimentConfig) -> RunManifest:
    """
    LV posterior under one simulation scheme, against noisy observed data.

    The observed series always carries measurement noise; ``mode`` only
    decides whether the simulated paths do too.
    """
    model = build_model(cfg)
    if not isinstance(model, LotkaVolterraModel):
        raise ConfigError("lv-study runs the Lotka-Volterra model", field="model")
    lv_config = model.config
    observed = LotkaVolterraModel(lv_config, "noise_matched").observe(lv_config.theta, None, cfg.seed)
    config = cfg.abc_config()
    recorder = _recorder(cfg)
    _write_observed(recorder, "observed.csv", observed)

    noise_floor = float(np.sum(np.square(lv_config.noise_sd)))
    runs = []
    for stat in _require(cfg.statistic_sets, "statistic_sets"):
        distance = DistanceSpec("lv_raw_path" if stat == RAW_PATH else "euclidean")
        posterior = run_rejection_abc(observed, model, statistic_choice(stat), distance, config)
        entry = _write_posterior(recorder, f"{stat}_{cfg.mode}", posterior, config.kde_grid_points)
        entry.update({
            "statistics": stat,
            "mode": cfg.mode,
            "min_distance": posterior.metadata.get("min_distance"),
            "posterior_mean": posterior.thetas.mean(axis=0).tolist() if posterior.n_accepted else None,
        })
        if stat == RAW_PATH:
            entry["noise_floor"] = noise_floor
            entry["below_noise_floor"] = bool(entry["min_distance"] < noise_floor)
        runs.append(entry)
        logger.info(f"LV {cfg.mode} / {stat}: {posterior.n_accepted} accepted, min distance {entry['min_distance']}")

    recorder.json("lv_study.json", {"model": model.describe(), "runs": runs})
    return recorder.finish()


COMMAND_RUNNERS = {
    "abc": cmd_abc_run,
    "augment": cmd_diagnose_augment,
    "injectivity": cmd_diagnose_injectivity,
    "sweep": cmd_analytic_sweep,
    "lv": cmd_lv_study,
}


def run_experiment(cfg: ExperimentConfig) -> RunManifest:
    return COMMAND_RUNNERS[cfg.command](cfg)
