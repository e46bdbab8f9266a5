"""
Prior samplers over each model's constraint region.

Draw ``i`` is produced by its own Philox stream ``(seed, PROPOSAL_STREAM, i)``
so any subset of indices can be regenerated independently.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from utils.exceptions import DomainError
from utils.rng import PROPOSAL_STREAM, make_generator

from .regions import get_region, REGION_TAGS
from .types import ParameterVector

logger = logging.getLogger(__name__)

PRIOR_MODELS = ("ar1", "ma2", "gaussian_mean", "lotka_volterra")


@dataclass
class PriorSample:
    """
    A block of prior draws.

    Attributes:
        thetas: Array of shape (count, p)
        proposals: Box proposals consumed by rejection (equals count when no rejection is needed)
        region_tag: Region of the draws
    """

    thetas: np.ndarray
    proposals: int
    region_tag: str

    @property
    def acceptance_fraction(self) -> float:
        return self.thetas.shape[0] / self.proposals if self.proposals else 0.0

    def vectors(self) -> List[ParameterVector]:
        return [ParameterVector.of(row, self.region_tag) for row in self.thetas]


def _uniform_box(rng: np.random.Generator, box: Sequence[Tuple[float, float]]) -> np.ndarray:
    lows = np.array([lo for lo, _ in box])
    highs = np.array([hi for _, hi in box])
    return lows + (highs - lows) * rng.random(len(box))


def draw_prior_indices(
    model: str,
    indices: Iterable[int],
    seed: int,
    lv_box: Optional[Sequence[Tuple[float, float]]] = None
) -> Tuple[np.ndarray, int]:
    """
    Prior draws for the given draw indices.

    Args:
        model: One of "ar1", "ma2", "gaussian_mean", "lotka_volterra"
        indices: Global draw indices
        seed: Run seed
        lv_box: Override of the configured LV prior box

    Returns:
        (thetas of shape (len(indices), p), number of box proposals used)
    """
    if model not in PRIOR_MODELS:
        raise DomainError(f"No prior defined for model '{model}'")
    region = get_region(REGION_TAGS[model])
    indices = list(indices)
    thetas = np.empty((len(indices), region.dim))
    proposals = 0

    if model == "ma2":
        box = region.prior_box
        for row, index in enumerate(indices):
            rng = make_generator(seed, PROPOSAL_STREAM, index)
            while True:
                candidate = _uniform_box(rng, box)
                proposals += 1
                # triangle = wedge constraints inside the box
                if region.contains_one(candidate):
                    thetas[row] = candidate
                    break
        return thetas, proposals

    if model == "ar1":
        box = ((-1.0, 1.0),)
    elif model == "lotka_volterra":
        box = lv_box if lv_box is not None else region.prior_box
    for row, index in enumerate(indices):
        rng = make_generator(seed, PROPOSAL_STREAM, index)
        if model == "gaussian_mean":
            thetas[row] = rng.standard_normal(1)
        else:
            thetas[row] = _uniform_box(rng, box)
    return thetas, len(indices)


def draw_prior_sample(model: str, count: int, seed: int) -> PriorSample:
    """Draw ``count`` prior values and keep the rejection bookkeeping."""
    if int(count) < 1:
        raise DomainError(f"Prior sample count must be >= 1, got {count}")
    thetas, proposals = draw_prior_indices(model, range(int(count)), seed)
    sample = PriorSample(thetas, proposals, REGION_TAGS[model])
    logger.debug(f"Drew {count} {model} prior values ({proposals} proposals)")
    return sample


def sample_prior(model: str, count: int, seed: int) -> List[ParameterVector]:
    """
    i.i.d. prior draws over the model's constraint region.

    AR(1): Uniform(-1, 1). MA(2): uniform over the invertibility triangle by
    rejection from (-2, 2) x (-1, 1). Gaussian mean: N(0, 1). LV: uniform over
    the configured box, (0, 3)^2 by default.

    Example:
        >>> draws = sample_prior("ma2", 1000, seed=3)
        >>> len(draws)
        1000
    """
    return draw_prior_sample(model, count, seed).vectors()

