"""
Constraint regions of the model parameters.

Each region knows its membership test (vectorised over rows), the box its
prior lives in, and the box scanned by grid-based preimage searches.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple, Union

import numpy as np

from utils.config_loader import load_config
from utils.exceptions import DomainError

from .types import ParameterVector

logger = logging.getLogger(__name__)

Box = Tuple[Tuple[float, float], ...]


def _ar1_contains(thetas: np.ndarray) -> np.ndarray:
    return np.abs(thetas[:, 0]) < 1.0


def _ma2_contains(thetas: np.ndarray) -> np.ndarray:
    t1, t2 = thetas[:, 0], thetas[:, 1]
    return (t1 > -2.0) & (t1 < 2.0) & (t1 + t2 > -1.0) & (t1 - t2 < 1.0)


def _lv_contains(thetas: np.ndarray) -> np.ndarray:
    return np.all(thetas > 0.0, axis=1)


def _everywhere(thetas: np.ndarray) -> np.ndarray:
    return np.all(np.isfinite(thetas), axis=1)


@dataclass(frozen=True)
class Region:
    """
    A parameter constraint region.

    Attributes:
        tag: Region name, matching ParameterVector.region_tag
        dim: Parameter dimension
        description: Human readable inequalities
        prior_box: Box the prior (and the injectivity grid) lives in
        search_box: Box scanned by grid preimage search
    """

    tag: str
    dim: int
    description: str
    membership: Callable[[np.ndarray], np.ndarray]
    prior_box: Box
    search_box: Box

    def contains(self, thetas: Union[np.ndarray, ParameterVector]) -> np.ndarray:
        """Membership of each row of an (n, p) array (or of a single vector)."""
        arr = self.as_rows(thetas)
        return self.membership(arr)

    def contains_one(self, theta: Union[np.ndarray, ParameterVector]) -> bool:
        return bool(self.contains(theta)[0])

    def as_rows(self, thetas: Union[np.ndarray, ParameterVector, float]) -> np.ndarray:
        if isinstance(thetas, ParameterVector):
            thetas = thetas.as_array()
        arr = np.asarray(thetas, dtype=float)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        elif arr.ndim == 1:
            arr = arr.reshape(1, -1) if arr.shape[0] == self.dim else arr.reshape(-1, 1)
        if arr.shape[1] != self.dim:
            raise DomainError(f"Region '{self.tag}' expects dimension {self.dim}, got {arr.shape[1]}")
        return arr

    def validate(self, theta: Union[np.ndarray, ParameterVector, float]) -> np.ndarray:
        """
        Return ``theta`` as a flat array, raising DomainError outside the region.
        """
        arr = self.as_rows(theta)
        if arr.shape[0] != 1:
            raise DomainError("validate expects a single parameter vector")
        if not self.membership(arr)[0]:
            logger.error(f"Parameter {arr[0].tolist()} outside region '{self.tag}' ({self.description})")
            raise DomainError(f"Parameter {arr[0].tolist()} is outside region '{self.tag}': {self.description}")
        return arr[0]

    def vector(self, values) -> ParameterVector:
        return ParameterVector.of(values, self.tag)


def _box(raw, fallback: Box) -> Box:
    if raw is None:
        return fallback
    return tuple((float(lo), float(hi)) for lo, hi in raw)


def get_region(tag: str) -> Region:
    """
    Look up a region by tag, with boxes taken from config.yaml.

    Raises:
        DomainError: If the tag is unknown
    """
    config = load_config()
    if tag == "ar1":
        return Region(
            "ar1", 1, "|theta| < 1", _ar1_contains,
            prior_box=((-1.0, 1.0),),
            search_box=_box(config.get_search_box("ar1"), ((-5.0, 5.0),)),
        )
    if tag == "ma2":
        return Region(
            "ma2", 2, "-2 < theta1 < 2, theta1 + theta2 > -1, theta1 - theta2 < 1", _ma2_contains,
            prior_box=_box(config.get_ma2_prior_box(), ((-2.0, 2.0), (-1.0, 1.0))),
            search_box=_box(config.get_search_box("ma2"), ((-4.0, 4.0), (-2.0, 6.0))),
        )
    if tag == "lv":
        box = _box(config.get_lv_defaults()["prior_box"], ((0.0, 3.0), (0.0, 3.0)))
        return Region("lv", 2, "theta1 > 0, theta2 > 0", _lv_contains, prior_box=box, search_box=box)
    if tag == "gaussian_mean":
        return Region(
            "gaussian_mean", 1, "theta real", _everywhere,
            prior_box=((-5.0, 5.0),), search_box=((-10.0, 10.0),),
        )
    raise DomainError(f"Unknown parameter region: {tag}")


def in_box(thetas: np.ndarray, box: Box) -> np.ndarray:
    """Rows of ``thetas`` lying strictly inside ``box``."""
    lows = np.array([lo for lo, _ in box])
    highs = np.array([hi for _, hi in box])
    return np.all((thetas > lows) & (thetas < highs), axis=1)


REGION_TAGS: Dict[str, str] = {
    "ar1": "ar1",
    "ma2": "ma2",
    "lotka_volterra": "lv",
    "gaussian_mean": "gaussian_mean",
}


def region_for_model(model_name: str) -> Optional[Region]:
    tag = REGION_TAGS.get(model_name)
    return get_region(tag) if tag else None
