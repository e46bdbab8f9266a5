"""
Grid-based injectivity certification of analytic bindings.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Set, Tuple

import numpy as np
from scipy.spatial import cKDTree

from series_models.regions import Box, in_box
from series_models.types import ParameterVector
from utils.config_loader import load_config
from utils.exceptions import DomainError

from .functions import BindingFunction
from .preimage import solve_preimage

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class InjectivityVerdict:
    """
    Outcome of an injectivity check.

    Attributes:
        injective: True when the search finished without a collision, False
            with a confirmed collision, None when the polish budget ran out
            before every candidate pair was checked
        witness: Colliding pair (theta_a, theta_b) for a non-injective verdict
        grid_resolution: Grid points per dimension (analytic) or K* (simulation)
        rho_min: Minimum parameter separation of a collision
        tau: Maximum binding-value separation of a collision
        method: "analytic_grid" or "simulation"
        witness_gap: ||b(theta_a) - b(theta_b)|| of the witness
        candidates: Grid pairs (or simulated pairs) that passed the coarse test
        polished: Exact preimage solves run
        unresolved: Candidate pairs left unpolished when the polish budget ran out
        collisions: Every colliding pair found (simulation method lists all)
    """

    injective: Optional[bool]
    witness: Optional[Tuple[ParameterVector, ParameterVector]]
    grid_resolution: int
    rho_min: float
    tau: float
    method: str
    witness_gap: Optional[float] = None
    candidates: int = 0
    polished: int = 0
    unresolved: int = 0
    binding_name: str = ""
    collisions: Optional[List[Tuple[ParameterVector, ParameterVector]]] = None

    @property
    def status(self) -> str:
        if self.injective is None:
            return "undetermined"
        return "injective" if self.injective else "not_injective"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "binding": self.binding_name,
            "method": self.method,
            "injective": self.injective,
            "status": self.status,
            "witness": None if self.witness is None else [list(w.values) for w in self.witness],
            "witness_gap": self.witness_gap,
            "grid_resolution": self.grid_resolution,
            "rho_min": self.rho_min,
            "tau": self.tau,
            "candidates": self.candidates,
            "polished": self.polished,
            "unresolved": self.unresolved,
            "collisions": len(self.collisions or ()),
        }


def reverify_witness(binding: BindingFunction, verdict: InjectivityVerdict) -> bool:
    """Re-check a witness by direct evaluation of the binding."""
    if verdict.witness is None:
        return False
    a, b = verdict.witness
    if a.distance_to(b) < verdict.rho_min:
        return False
    gap = float(np.linalg.norm(binding(a) - binding(b)))
    return gap <= verdict.tau


def _grid(bounds: Box, resolution: int) -> np.ndarray:
    axes = [np.linspace(lo, hi, resolution) for lo, hi in bounds]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.ravel() for m in mesh])


def check_injectivity_analytic(
    binding: BindingFunction,
    bounds: Optional[Box] = None,
    rho_min: Optional[float] = None,
    tau: Optional[float] = None,
    resolution: Optional[int] = None,
    max_polish: Optional[int] = None
) -> InjectivityVerdict:
    """
    Search a dense grid of the region for distant parameters with close b-values.

    Pairs within ``tau`` in b-space are found with a k-d tree; pairs at least
    ``rho_min`` apart in parameter space are polished, closest b-gap first, by
    solving the exact preimage of b(theta_a). A feasible root inside the
    bounds at distance >= rho_min from theta_a is a confirmed collision.

    Args:
        binding: Analytic binding to certify
        bounds: Grid box, intersected with the binding's region (prior box by default)
        rho_min: Minimum parameter separation of a collision
        tau: Maximum b-value gap of a candidate pair
        resolution: Grid points per dimension (500 by default)
        max_polish: Exact preimage solves allowed before giving up

    Returns:
        InjectivityVerdict; non-injective verdicts carry a witness with
        ||b(a) - b(b)|| <= 1e-8

    Raises:
        DomainError: If rho_min or tau is not positive

    Example:
        >>> check_injectivity_analytic(ma2_binding(("acov0", "acov1"))).injective
        False
    """
    settings = load_config().get_binding_defaults()
    rho_min = float(rho_min if rho_min is not None else settings["rho_min"])
    tau = float(tau if tau is not None else settings["tau"])
    if not (rho_min > 0 and tau > 0):
        raise DomainError(f"rho_min and tau must be positive, got rho_min={rho_min}, tau={tau}")
    resolution = int(resolution or settings["injectivity_grid"])
    max_polish = int(max_polish if max_polish is not None else settings["max_polish"])
    region = binding.region
    bounds = tuple(tuple(map(float, b)) for b in (bounds or region.prior_box))

    points = _grid(bounds, resolution)
    points = points[region.contains(points)]
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        values = binding.evaluate_rows(points)
    finite = np.all(np.isfinite(values), axis=1)
    points, values = points[finite], values[finite]
    logger.info(
        f"Injectivity scan of {binding.name}{list(binding.components)}: {points.shape[0]} grid points, "
        f"rho_min={rho_min:g}, tau={tau:g}"
    )

    pairs = cKDTree(values).query_pairs(tau, output_type="ndarray")
    if pairs.size:
        separation = np.linalg.norm(points[pairs[:, 0]] - points[pairs[:, 1]], axis=1)
        pairs = pairs[separation >= rho_min]
    if pairs.size:
        gaps = np.linalg.norm(values[pairs[:, 0]] - values[pairs[:, 1]], axis=1)
        pairs = pairs[np.argsort(gaps, kind="stable")]
    verdict = InjectivityVerdict(True, None, resolution, rho_min, tau, "analytic_grid",
                                 candidates=int(pairs.shape[0]), binding_name=binding.name)

    polished: Set[int] = set()
    for position, (i, j) in enumerate(pairs):
        if i in polished and j in polished:
            continue
        if len(polished) >= max_polish:
            verdict.unresolved = int(pairs.shape[0] - position)
            verdict.injective = None
            logger.warning(f"Polish budget of {max_polish} exhausted; {verdict.unresolved} candidate pairs unresolved")
            break
        anchor, partner = (i, j) if i not in polished else (j, i)
        polished.add(int(anchor))
        witness = _polish(binding, points[anchor], points[partner], bounds, rho_min)
        if witness is not None:
            verdict.injective = False
            verdict.witness = witness
            verdict.witness_gap = float(np.linalg.norm(binding(witness[0]) - binding(witness[1])))
            verdict.collisions = [witness]
            break
    verdict.polished = len(polished)

    if verdict.injective is None:
        logger.warning(
            f"{binding.name}: undetermined, {verdict.unresolved} of {verdict.candidates} candidate pairs left unchecked"
        )
    elif verdict.injective:
        logger.info(f"{binding.name}: injective on the grid ({verdict.candidates} candidates, {verdict.polished} polished)")
    else:
        logger.info(
            f"{binding.name}: not injective, witness {verdict.witness[0].values} / {verdict.witness[1].values} "
            f"(gap {verdict.witness_gap:.3g})"
        )
    return verdict


def _polish(
    binding: BindingFunction,
    anchor: np.ndarray,
    partner: np.ndarray,
    bounds: Box,
    rho_min: float
) -> Optional[Tuple[ParameterVector, ParameterVector]]:
    result = solve_preimage(binding, binding.evaluate_rows(anchor)[0])
    others = [
        s for s in result.solutions
        if np.linalg.norm(s.as_array() - anchor) >= rho_min and in_box(s.as_array()[None, :], bounds)[0]
    ]
    if not others:
        return None
    other = min(others, key=lambda s: np.linalg.norm(s.as_array() - partner))
    logger.debug(f"Grid pair at {anchor.tolist()} polished into collision with {other.values}")
    return binding.region.vector(anchor), other
