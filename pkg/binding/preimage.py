"""
Preimage solving: every theta with b(theta) = target.

Closed forms:
    ar1_quadratic  b theta^2 + theta - b = 0 for the lag-1 autocovariance
    ma2_quartic    sets containing (acov0, acov1): with u = theta2, a = acov0 - 1,
                   u^4 + 2u^3 + (1 - a)u^2 - 2a u + acov1^2 - a = 0,
                   theta1 = acov1 / (1 + u); extra components filter the roots
Everything else: grid scan of the search box, local minima of the residual
below a coarse threshold, damped Newton refinement with tenacity retries.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.ndimage import minimum_filter

from series_models.regions import Box, Region
from series_models.types import ParameterVector
from utils.config_loader import load_config
from utils.exceptions import DomainError, RefinementError
from utils.retry_utils import retry_refinement

from .functions import BindingFunction, ma2_binding

logger = logging.getLogger(__name__)

SOLUTION_TOLERANCE = 1e-8


@dataclass(eq=False)
class PreimageResult:
    """
    Roots of b(theta) = target.

    Attributes:
        target: The b-value inverted
        solutions: Feasible roots (inside the region), sorted
        infeasible_solutions: Roots found outside the region
        suspect: Candidates whose refinement never converged
        method: "analytic_polynomial" or "grid_refine"
    """

    target: np.ndarray
    solutions: List[ParameterVector]
    infeasible_solutions: List[ParameterVector]
    suspect: List[ParameterVector] = field(default_factory=list)
    method: str = "grid_refine"
    binding_name: str = ""
    components: Tuple[str, ...] = ()

    @property
    def is_unique(self) -> bool:
        return len(self.solutions) == 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "binding": self.binding_name,
            "components": list(self.components),
            "method": self.method,
            "target": np.asarray(self.target).tolist(),
            "solutions": [list(s.values) for s in self.solutions],
            "infeasible_solutions": [list(s.values) for s in self.infeasible_solutions],
            "suspect": [list(s.values) for s in self.suspect],
        }


def finite_difference_jacobian(binding: BindingFunction, theta: np.ndarray) -> np.ndarray:
    """Central-difference Jacobian of the raw binding, shape (d, p)."""
    columns = []
    for k in range(theta.shape[0]):
        h = 1e-6 * max(1.0, abs(theta[k]))
        up, down = theta.copy(), theta.copy()
        up[k] += h
        down[k] -= h
        values = binding.evaluate_rows(np.vstack([up, down]))
        columns.append((values[0] - values[1]) / (2.0 * h))
    return np.column_stack(columns)


def newton_refine(
    binding: BindingFunction,
    start: np.ndarray,
    target: np.ndarray,
    tolerance: float = 1e-10,
    max_iterations: int = 100,
    damping: float = 1.0
) -> np.ndarray:
    """
    Damped Gauss-Newton iteration towards b(theta) = target.

    Raises:
        RefinementError: If ||b(theta) - target|| > tolerance after max_iterations,
            or the iterate leaves the binding's domain
    """
    x = np.array(start, dtype=float)
    residual = np.inf
    for _ in range(max_iterations):
        r = binding.evaluate_rows(x)[0] - target
        if not np.all(np.isfinite(r)):
            raise RefinementError("Refinement left the binding's domain", last_point=x, residual=np.inf)
        residual = float(np.linalg.norm(r))
        if residual <= tolerance:
            return x
        step, *_ = np.linalg.lstsq(finite_difference_jacobian(binding, x), r, rcond=None)
        if not np.all(np.isfinite(step)):
            raise RefinementError("Singular Jacobian during refinement", last_point=x, residual=residual)
        x = x - damping * step
    r = binding.evaluate_rows(x)[0] - target
    residual = float(np.linalg.norm(r)) if np.all(np.isfinite(r)) else np.inf
    if residual <= tolerance:
        return x
    raise RefinementError(
        f"No convergence after {max_iterations} iterations (residual {residual:.3g})",
        last_point=x, residual=residual
    )


def _refine(binding, start, target, settings) -> np.ndarray:
    return retry_refinement(
        newton_refine, binding, start, target,
        max_attempts=int(settings["refinement_attempts"]),
        tolerance=float(settings["newton_tolerance"]),
        max_iterations=int(settings["newton_max_iterations"]),
    )


def _dedupe(points: Sequence[np.ndarray], radius: float) -> List[np.ndarray]:
    kept: List[np.ndarray] = []
    for p in points:
        if all(np.linalg.norm(p - q) > radius for q in kept):
            kept.append(p)
    return kept


def _ar1_quadratic_roots(target: np.ndarray) -> List[np.ndarray]:
    b = float(target[0])
    if b == 0.0:
        return [np.array([0.0])]
    disc = np.sqrt(1.0 + 4.0 * b * b)
    return [np.array([(-1.0 + disc) / (2.0 * b)]), np.array([(-1.0 - disc) / (2.0 * b)])]


def _ma2_quartic_roots(binding: BindingFunction, target: np.ndarray, settings) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    g0 = float(target[binding.components.index("acov0")])
    g1 = float(target[binding.components.index("acov1")])
    a = g0 - 1.0
    roots = np.roots([1.0, 2.0, 1.0 - a, -2.0 * a, g1 * g1 - a])
    candidates = []
    for root in roots:
        if abs(root.imag) > 1e-6 * max(1.0, abs(root)):
            continue
        u = float(root.real)
        if abs(1.0 + u) < 1e-12:
            continue
        candidates.append(np.array([g1 / (1.0 + u), u]))
    # theta2 = -1 solves the pair only when acov1 = 0
    if abs(g1) <= 1e-12 and g0 >= 2.0:
        t1 = np.sqrt(g0 - 2.0)
        candidates.extend([np.array([t1, -1.0]), np.array([-t1, -1.0])])

    pair = ma2_binding(("acov0", "acov1"))
    pair_target = np.array([g0, g1])
    polished, suspect = [], []
    for candidate in candidates:
        try:
            polished.append(_refine(pair, candidate, pair_target, settings))
        except RefinementError as e:
            logger.warning(f"Quartic root {candidate.tolist()} did not polish: {e}")
            suspect.append(candidate)
    return polished, suspect


def _grid_candidates(binding: BindingFunction, target: np.ndarray, box: Box, resolution: int, threshold: float) -> List[np.ndarray]:
    axes = [np.linspace(lo, hi, resolution) for lo, hi in box]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.column_stack([m.ravel() for m in mesh])
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        residual = np.linalg.norm(binding.evaluate_rows(points) - target, axis=1)
    residual[~np.isfinite(residual)] = np.inf
    surface = residual.reshape(mesh[0].shape)
    is_min = (minimum_filter(surface, size=3, mode="nearest") == surface) & (surface < threshold)
    flat = np.flatnonzero(is_min.ravel())
    flat = flat[np.argsort(residual[flat], kind="stable")]
    logger.debug(f"Grid scan of {points.shape[0]} points kept {flat.size} candidate minima")
    return [points[i] for i in flat]


def solve_preimage(
    binding: BindingFunction,
    target,
    region: Optional[Region] = None,
    box: Optional[Box] = None,
    resolution: Optional[int] = None,
    coarse_threshold: Optional[float] = None
) -> PreimageResult:
    """
    Find every theta with b(theta) = target and split them by feasibility.

    Args:
        binding: Binding function to invert
        target: b-value, one entry per binding component
        region: Feasibility region (the binding's own region by default)
        box: Grid-search box (the region's configured search box by default)
        resolution: Grid points per dimension (400 by default)
        coarse_threshold: Residual below which a grid minimum becomes a candidate

    Returns:
        PreimageResult; every feasible solution re-evaluates to the target within 1e-8

    Raises:
        DomainError: If the target is not finite or has the wrong dimension

    Example:
        >>> result = solve_preimage(ma2_binding(("acov0", "acov1")), [1.4, 0.72])
        >>> [s.values for s in result.solutions]
        [(0.5453..., 0.3204...), (0.6, 0.2)]
    """
    target = np.atleast_1d(np.asarray(target, dtype=float))
    if target.shape[0] != binding.dimension or not np.all(np.isfinite(target)):
        raise DomainError(f"Target must be {binding.dimension} finite values, got {target.tolist()}")
    region = region or binding.region
    settings = load_config().get_binding_defaults()
    resolution = int(resolution or settings["preimage_grid"])
    threshold = float(coarse_threshold or settings["coarse_threshold"])
    radius = float(settings["dedupe_radius"])

    suspect: List[np.ndarray] = []
    if binding.closed_form == "ar1_quadratic":
        method = "analytic_polynomial"
        roots = _ar1_quadratic_roots(target)
    elif binding.closed_form == "ma2_quartic":
        method = "analytic_polynomial"
        roots, suspect = _ma2_quartic_roots(binding, target, settings)
    else:
        method = "grid_refine"
        roots = []
        for start in _grid_candidates(binding, target, box or region.search_box, resolution, threshold):
            if any(np.linalg.norm(start - r) <= radius for r in roots):
                continue
            try:
                roots.append(_refine(binding, start, target, settings))
            except RefinementError as e:
                logger.warning(f"Grid candidate {np.round(start, 6).tolist()} is suspect: {e}")
                suspect.append(e.last_point if e.last_point is not None else start)

    roots = _dedupe(roots, radius)
    feasible, infeasible = [], []
    for root in sorted(roots, key=lambda r: tuple(np.round(r, 9))):
        inside = region.contains_one(root)
        if inside:
            with np.errstate(invalid="ignore"):
                residual = float(np.linalg.norm(binding.evaluate_rows(root)[0] - target))
            if not residual <= SOLUTION_TOLERANCE:
                # root of a sub-block only; extra components rule it out
                continue
            feasible.append(region.vector(root))
        elif method == "grid_refine" or binding.closed_form == "ar1_quadratic" or _matches(binding, root, target):
            infeasible.append(region.vector(root))

    result = PreimageResult(
        target, feasible, infeasible, [region.vector(p) for p in _dedupe(suspect, radius)],
        method, binding.name, binding.components,
    )
    logger.debug(
        f"Preimage of {np.round(target, 6).tolist()} under {binding.name}{list(binding.components)}: "
        f"{len(feasible)} feasible, {len(infeasible)} infeasible, {len(result.suspect)} suspect ({method})"
    )
    return result


def _matches(binding: BindingFunction, root: np.ndarray, target: np.ndarray) -> bool:
    with np.errstate(invalid="ignore"):
        residual = np.linalg.norm(binding.evaluate_rows(root)[0] - target)
    return bool(residual <= SOLUTION_TOLERANCE)
