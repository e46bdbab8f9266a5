"""
Model objects tying a prior, a simulator and a constraint region together.

The ABC engine and the diagnostics only talk to ``SeriesModel``; each model
decides how a block of proposals is simulated (LV integrates a whole block in
one vectorised RK4 pass).
"""

import logging
from abc import ABC, abstractmethod
from typing import List, Optional, Sequence, Tuple

import numpy as np

from utils.config_loader import load_config
from utils.exceptions import DomainError, IntegrationError
from utils.rng import OBSERVED_STREAM, SIMULATION_STREAM, make_generator

from .lotka_volterra import SIMULATION_MODES, integrate_lv_batch
from .priors import draw_prior_indices
from .processes import ar1_path, iid_normal_path, ma2_path
from .regions import Region, get_region
from .types import LvConfig, ParameterVector, SeriesSource, TimeSeries

logger = logging.getLogger(__name__)


class SeriesModel(ABC):
    """Base class of the data-generating processes."""

    name: str = ""
    region_tag: str = ""
    min_length: int = 1

    @property
    def region(self) -> Region:
        return get_region(self.region_tag)

    @property
    def dim(self) -> int:
        return self.region.dim

    @property
    def is_stochastic(self) -> bool:
        return True

    @property
    def fixed_length(self) -> Optional[int]:
        """Series length imposed by the model itself, if any."""
        return None

    def path_length(self, length: Optional[int]) -> int:
        if length is None or int(length) < self.min_length:
            raise DomainError(f"{self.name} needs series length >= {self.min_length}, got {length}")
        return int(length)

    @abstractmethod
    def simulate_path(self, theta: np.ndarray, length: int, rng: Optional[np.random.Generator]) -> np.ndarray:
        """Simulate one raw path for an already validated theta."""

    def draw_prior(self, indices: Sequence[int], seed: int) -> np.ndarray:
        thetas, _ = draw_prior_indices(self.name, indices, seed)
        return thetas

    def simulate(self, theta, length: Optional[int], seed: int, stream: Tuple[int, ...] = ()) -> TimeSeries:
        """
        Validated single simulation wrapped in a TimeSeries.

        Raises:
            DomainError: If theta is outside the region or the length is too short
        """
        vector = theta if isinstance(theta, ParameterVector) else self.region.vector(theta)
        values = self.region.validate(vector)
        path = self.simulate_path(values, self.path_length(length), make_generator(seed, *stream))
        return self._wrap(path, vector, seed)

    def observe(self, theta, length: Optional[int], seed: int, *stream: int) -> TimeSeries:
        """Synthetic observed data at the true parameter, on the observed-data stream."""
        series = self.simulate(theta, length, seed, (OBSERVED_STREAM,) + tuple(stream))
        return TimeSeries(series.observations, SeriesSource("observed", series.source.theta, seed), series.times)

    def _wrap(self, path: np.ndarray, vector: ParameterVector, seed: int) -> TimeSeries:
        return TimeSeries(path, SeriesSource("simulated", vector, seed))

    def propose(self, indices: Sequence[int], seed: int, length: Optional[int]) -> Tuple[np.ndarray, List[np.ndarray]]:
        """
        Prior draws and their simulated paths for a block of draw indices.

        Path ``i`` uses the stream ``(seed, SIMULATION_STREAM, i)``.
        """
        length = self.path_length(length)
        thetas = self.draw_prior(indices, seed)
        paths = [
            self.simulate_path(theta, length, make_generator(seed, SIMULATION_STREAM, int(index)))
            for theta, index in zip(thetas, indices)
        ]
        return thetas, paths

    def describe(self) -> dict:
        return {"model": self.name}


class AR1Model(SeriesModel):
    name = "ar1"
    region_tag = "ar1"
    min_length = 2

    def simulate_path(self, theta, length, rng):
        return ar1_path(float(theta[0]), length, rng)


class MA2Model(SeriesModel):
    name = "ma2"
    region_tag = "ma2"
    min_length = 3

    def simulate_path(self, theta, length, rng):
        return ma2_path(float(theta[0]), float(theta[1]), length, rng)


class GaussianMeanModel(SeriesModel):
    name = "gaussian_mean"
    region_tag = "gaussian_mean"
    min_length = 1

    def simulate_path(self, theta, length, rng):
        return iid_normal_path(float(theta[0]), length, rng)


class LotkaVolterraModel(SeriesModel):
    """
    LV observations under one of the two simulation schemes.

    Attributes:
        config: Integration settings (its theta is the true parameter)
        mode: "deterministic" (raw path) or "noise_matched" (path plus fresh noise)
    """

    name = "lotka_volterra"
    region_tag = "lv"
    min_length = 2

    def __init__(self, config: Optional[LvConfig] = None, mode: str = "noise_matched"):
        if mode not in SIMULATION_MODES:
            raise DomainError(f"Unknown LV simulation mode: {mode}")
        self.config = config if config is not None else default_lv_config()
        self.mode = mode

    @property
    def is_stochastic(self) -> bool:
        return self.mode == "noise_matched" and not self.config.noise.is_zero

    @property
    def fixed_length(self) -> Optional[int]:
        return self.config.n_points

    def path_length(self, length: Optional[int]) -> int:
        if length is not None and int(length) != self.config.n_points:
            raise DomainError(f"LV paths have {self.config.n_points} points, requested {length}")
        return self.config.n_points

    def _noisy(self, paths: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return paths + self.config.noise.draw(rng, self.config.n_points)

    def simulate_path(self, theta, length, rng):
        path = integrate_lv_batch(np.asarray(theta, dtype=float)[None, :], self.config)[0]
        if np.isnan(path).any():
            raise IntegrationError(f"LV state left the admissible box at theta={list(theta)}")
        if self.mode == "noise_matched":
            path = self._noisy(path, rng)
        return path

    def _wrap(self, path, vector, seed):
        return TimeSeries(path, SeriesSource("simulated", vector, seed), times=self.config.observation_times())

    def propose(self, indices, seed, length):
        self.path_length(length)
        thetas = self.draw_prior(indices, seed)
        batch = integrate_lv_batch(thetas, self.config)
        paths = []
        for row, index in enumerate(indices):
            path = batch[row]
            if self.mode == "noise_matched":
                path = self._noisy(path, make_generator(seed, SIMULATION_STREAM, int(index)))
            paths.append(path)
        return thetas, paths

    def describe(self) -> dict:
        cfg = self.config
        return {
            "model": self.name, "mode": self.mode, "theta0": list(cfg.theta.values), "x0": list(cfg.x0),
            "t_end": cfg.t_end, "n_points": cfg.n_points, "step": cfg.step, "noise_sd": list(cfg.noise_sd),
        }


def default_lv_config(**overrides) -> LvConfig:
    """LvConfig built from the ``models.lotka_volterra`` section of config.yaml."""
    defaults = load_config().get_lv_defaults()
    settings = {
        "theta": ParameterVector.of(defaults["theta0"], "lv"),
        "x0": tuple(defaults["x0"]),
        "t_end": float(defaults["t_end"]),
        "n_points": int(defaults["n_points"]),
        "step": float(defaults["step"]),
        "noise_sd": tuple(defaults["noise_sd"]),
    }
    n_points = overrides.pop("n_points", None)
    settings.update({k: v for k, v in overrides.items() if v is not None})
    config = LvConfig(**settings)
    return config.with_points(int(n_points)) if n_points is not None else config


MODEL_NAMES = ("ar1", "ma2", "gaussian_mean", "lotka_volterra")


def get_model(name: str, **kwargs) -> SeriesModel:
    """
    Instantiate a model by name.

    Args:
        name: "ar1", "ma2", "gaussian_mean" or "lotka_volterra" (alias "lv")
        **kwargs: LV only: ``config`` and ``mode``

    Raises:
        DomainError: If the name is unknown
    """
    if name in ("lotka_volterra", "lv"):
        return LotkaVolterraModel(**kwargs)
    models = {"ar1": AR1Model, "ma2": MA2Model, "gaussian_mean": GaussianMeanModel}
    if name not in models:
        raise DomainError(f"Unknown model: {name}")
    return models[name]()
