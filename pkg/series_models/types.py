"""
Core data types for the series models.

ParameterVector and TimeSeries are plain frozen containers; validation of a
parameter against its constraint region lives in ``regions``.
"""

import math
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from utils.exceptions import DomainError
from utils.io_utils import write_csv

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParameterVector:
    """
    An ordered parameter value tagged with the region it is meant to live in.

    Attributes:
        values: Parameter coordinates (dimension p)
        region_tag: Name of the constraint region ("ar1", "ma2", "lv", "gaussian_mean")
    """

    values: Tuple[float, ...]
    region_tag: str

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise DomainError("ParameterVector needs at least one value")

    @classmethod
    def of(cls, values: Union[float, Iterable[float], np.ndarray], region_tag: str) -> "ParameterVector":
        """Build from a scalar, a sequence or a numpy array."""
        return cls(tuple(np.atleast_1d(np.asarray(values, dtype=float)).tolist()), region_tag)

    @property
    def dim(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def distance_to(self, other: "ParameterVector") -> float:
        return float(np.linalg.norm(self.as_array() - other.as_array()))

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, index: int) -> float:
        return self.values[index]


@dataclass(frozen=True)
class SeriesSource:
    """Where a series came from: observed data, or a simulation at (theta, seed)."""

    kind: str = "observed"
    theta: Optional[ParameterVector] = None
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("observed", "simulated"):
            raise DomainError(f"Unknown series source kind: {self.kind}")


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """
    Scalar series of shape (T,) or bivariate series of shape (R_T, 2).

    Attributes:
        observations: Finite observation values
        source: Provenance of the series
        times: Observation times (LV paths); None means 1..T
    """

    observations: np.ndarray
    source: SeriesSource = field(default_factory=SeriesSource)
    times: Optional[np.ndarray] = None

    def __post_init__(self):
        obs = np.asarray(self.observations, dtype=float)
        if obs.ndim not in (1, 2) or obs.shape[0] == 0:
            raise DomainError(f"Series must be a nonempty 1-D or 2-D array, got shape {obs.shape}")
        if obs.ndim == 2 and obs.shape[1] != 2:
            raise DomainError(f"Bivariate series must have two columns, got {obs.shape[1]}")
        if not np.all(np.isfinite(obs)):
            raise DomainError("Series contains non-finite entries")
        obs.setflags(write=False)
        object.__setattr__(self, "observations", obs)
        if self.times is not None:
            times = np.asarray(self.times, dtype=float)
            if times.shape[0] != obs.shape[0]:
                raise DomainError("Observation times do not match the series length")
            object.__setattr__(self, "times", times)

    @property
    def length(self) -> int:
        return int(self.observations.shape[0])

    @property
    def is_bivariate(self) -> bool:
        return self.observations.ndim == 2

    def require_length(self, minimum: int, purpose: str = "this operation") -> None:
        if self.length < minimum:
            raise DomainError(f"{purpose} needs a series of length >= {minimum}, got {self.length}")

    def to_frame(self) -> pd.DataFrame:
        t = self.times if self.times is not None else np.arange(1, self.length + 1)
        frame = pd.DataFrame({"t": t})
        if self.is_bivariate:
            frame["x1"] = self.observations[:, 0]
            frame["x2"] = self.observations[:, 1]
        else:
            frame["x1"] = self.observations
        return frame

    def to_csv(self, path: Union[str, Path]) -> Path:
        """Write the series with header ``t,x1[,x2]``."""
        return write_csv(self.to_frame(), path)


@dataclass(frozen=True)
class NoiseSpec:
    """Additive Gaussian measurement error, independent per coordinate."""

    sd_per_coordinate: Tuple[float, ...]
    distribution: str = "gaussian"

    def __post_init__(self):
        object.__setattr__(self, "sd_per_coordinate", tuple(float(s) for s in self.sd_per_coordinate))
        if self.distribution != "gaussian":
            raise DomainError(f"Only Gaussian measurement noise is supported, got {self.distribution}")
        for sd in self.sd_per_coordinate:
            if not math.isfinite(sd) or sd < 0:
                raise DomainError(f"Noise standard deviations must be finite and >= 0, got {sd}")

    @property
    def is_zero(self) -> bool:
        return all(sd == 0.0 for sd in self.sd_per_coordinate)

    def draw(self, rng: np.random.Generator, n_points: int) -> np.ndarray:
        return rng.standard_normal((n_points, len(self.sd_per_coordinate))) * np.asarray(self.sd_per_coordinate)


@dataclass(frozen=True)
class LvConfig:
    """
    Lotka-Volterra integration and observation settings.

    Observations are taken at t_i = i * t_end / n_points, i = 1..n_points.
    The RK4 step must divide that spacing exactly.
    """

    theta: ParameterVector
    x0: Tuple[float, float] = (1.0, 0.5)
    t_end: float = 15.0
    n_points: int = 500
    step: float = 0.01
    noise_sd: Tuple[float, float] = (0.5, 0.5)

    def __post_init__(self):
        if not isinstance(self.theta, ParameterVector):
            object.__setattr__(self, "theta", ParameterVector.of(self.theta, "lv"))
        object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))
        object.__setattr__(self, "noise_sd", tuple(float(v) for v in self.noise_sd))
        if self.theta.dim != 2:
            raise DomainError(f"LV theta must have two values, got {self.theta.dim}")
        if len(self.x0) != 2:
            raise DomainError("LV initial state must be a pair")
        if self.t_end <= 0 or self.n_points < 1:
            raise DomainError("t_end must be positive and n_points at least 1")
        if not self.step > 0:
            raise DomainError(f"Integration step must be positive, got {self.step}")
        spacing = self.spacing
        if self.step > spacing * (1 + 1e-9):
            raise DomainError(f"Integration step {self.step} exceeds observation spacing {spacing}")
        ratio = spacing / self.step
        if abs(ratio - round(ratio)) > 1e-6 * ratio:
            raise DomainError(f"Integration step {self.step} does not divide observation spacing {spacing}")
        NoiseSpec(self.noise_sd)

    @property
    def spacing(self) -> float:
        return self.t_end / self.n_points

    @property
    def substeps(self) -> int:
        """RK4 steps between consecutive observation times."""
        return max(1, int(round(self.spacing / self.step)))

    @property
    def noise(self) -> NoiseSpec:
        return NoiseSpec(self.noise_sd)

    def observation_times(self) -> np.ndarray:
        return self.spacing * np.arange(1, self.n_points + 1)

    def with_theta(self, theta: Union[ParameterVector, Sequence[float]]) -> "LvConfig":
        return replace(self, theta=theta if isinstance(theta, ParameterVector) else ParameterVector.of(theta, "lv"))

    def with_points(self, n_points: int) -> "LvConfig":
        """
        Same experiment observed at ``n_points`` times.

        The step becomes the largest value not above the current step that
        divides the new observation spacing.
        """
        spacing = self.t_end / n_points
        substeps = max(1, math.ceil(spacing / self.step - 1e-9))
        return replace(self, n_points=int(n_points), step=spacing / substeps)

    def with_step(self, step: float) -> "LvConfig":
        return replace(self, step=float(step))
