"""
Analytic binding functions b(theta): the large-sample limits of the summary
statistics under each model.

MA(2), theta = (theta1, theta2):
    acov0 = 1 + theta1^2 + theta2^2
    acov1 = theta1 (1 + theta2)
    acov2 = theta2
    acov3 = mean = third = 0

AR(1): acov_j = theta^j / (1 - theta^2), mean = third = 0.

AR(2) OLS limit on MA(2) data:
    beta1 = (g1 - g1 g2 / g0) / (g0 - g1^2 / g0)
    beta2 = g2 / g0 - (g1 / g0) beta1
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from series_models.regions import Region, get_region
from series_models.types import ParameterVector
from summaries.descriptors import StatisticSet, resolve_statistic_set
from utils.exceptions import DegenerateDesignError, DomainError

logger = logging.getLogger(__name__)

ThetaLike = Union[ParameterVector, np.ndarray, Sequence[float], float]

MA2_COMPONENTS = ("acov0", "acov1", "acov2", "acov3", "mean", "third")


def _rows(thetas, dim: int) -> np.ndarray:
    if isinstance(thetas, ParameterVector):
        thetas = thetas.as_array()
    arr = np.asarray(thetas, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1) if dim > 1 else arr.reshape(-1, 1)
    return arr


def ma2_components(thetas: np.ndarray, components: Sequence[str]) -> np.ndarray:
    """Vectorised MA(2) limits for rows of (theta1, theta2); no region check."""
    t1, t2 = thetas[:, 0], thetas[:, 1]
    zero = np.zeros_like(t1)
    table = {
        "acov0": 1.0 + t1 * t1 + t2 * t2,
        "acov1": t1 * (1.0 + t2),
        "acov2": t2,
        "acov3": zero,
        "mean": zero,
        "third": zero,
    }
    try:
        return np.column_stack([table[c] for c in components])
    except KeyError as e:
        raise DomainError(f"No MA(2) binding component {e}") from None


def ar1_components(thetas: np.ndarray, components: Sequence[str]) -> np.ndarray:
    """Vectorised AR(1) limits; NaN where |theta| >= 1."""
    t = thetas[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        variance = np.where(np.abs(t) < 1.0, 1.0 / (1.0 - t * t), np.nan)
    columns = []
    for c in components:
        if c.startswith("acov") and c[4:].isdigit():
            columns.append(t ** int(c[4:]) * variance)
        elif c in ("mean", "third"):
            columns.append(np.zeros_like(t))
        else:
            raise DomainError(f"No AR(1) binding component '{c}'")
    return np.column_stack(columns)


def ols_ar2_on_ma2_rows(thetas: np.ndarray) -> np.ndarray:
    """Vectorised (beta1, beta2) limit of the AR(2) OLS fit to MA(2) data."""
    g0, g1, g2 = ma2_components(thetas, ("acov0", "acov1", "acov2")).T
    with np.errstate(divide="ignore", invalid="ignore"):
        beta1 = (g1 - g1 * g2 / g0) / (g0 - g1 * g1 / g0)
        beta2 = g2 / g0 - (g1 / g0) * beta1
    return np.column_stack([beta1, beta2])


def gaussian_mean_components(thetas: np.ndarray, components: Sequence[str]) -> np.ndarray:
    t = thetas[:, 0]
    table = {"mean": t, "acov0": 1.0 + t * t, "third": t ** 3 + 3.0 * t}
    try:
        return np.column_stack([table[c] for c in components])
    except KeyError as e:
        raise DomainError(f"No Gaussian-mean binding component {e}") from None


@dataclass(frozen=True)
class BindingFunction:
    """
    A named map theta -> b(theta) over a constraint region.

    Attributes:
        name: Binding name ("ar1_acov1", "ma2_acov", "ols_ar2_on_ma2", ...)
        components: Component labels, in output order
        raw: Vectorised map on rows of theta, no region check
        region: Domain of the binding
        closed_form: Tag of the closed-form preimage solver, if any
    """

    name: str
    components: Tuple[str, ...]
    raw: Callable[[np.ndarray], np.ndarray]
    region: Region
    closed_form: Optional[str] = None

    @property
    def dim(self) -> int:
        return self.region.dim

    @property
    def dimension(self) -> int:
        return len(self.components)

    def evaluate_rows(self, thetas) -> np.ndarray:
        """b on rows of an (n, p) array, without region checks."""
        return self.raw(_rows(thetas, self.dim))

    def __call__(self, theta: ThetaLike) -> np.ndarray:
        """
        b(theta) for one feasible parameter.

        Raises:
            DomainError: If theta is outside the region
        """
        values = self.region.validate(theta)
        return self.raw(values[None, :])[0]


class _Bound:
    """Picklable partial application of a component table."""

    def __init__(self, fn, components):
        self.fn = fn
        self.components = tuple(components)

    def __call__(self, thetas: np.ndarray) -> np.ndarray:
        return self.fn(thetas, self.components)


def ar1_binding(components: Sequence[str] = ("acov1",)) -> BindingFunction:
    components = tuple(components)
    closed = "ar1_quadratic" if components == ("acov1",) else None
    name = "ar1_acov1" if components == ("acov1",) else "ar1_" + "_".join(components)
    return BindingFunction(name, components, _Bound(ar1_components, components), get_region("ar1"), closed)


def ma2_binding(components: Sequence[str]) -> BindingFunction:
    components = tuple(components)
    unknown = [c for c in components if c not in MA2_COMPONENTS]
    if unknown:
        raise DomainError(f"No MA(2) binding component(s) {unknown}")
    closed = "ma2_quartic" if {"acov0", "acov1"} <= set(components) else None
    return BindingFunction("ma2_acov", components, _Bound(ma2_components, components), get_region("ma2"), closed)


def ols_ar2_on_ma2_binding() -> BindingFunction:
    return BindingFunction("ols_ar2_on_ma2", ("ols_beta1", "ols_beta2"), ols_ar2_on_ma2_rows, get_region("ma2"))


def binding_for(model: str, statistics: Union[StatisticSet, str, Sequence[str]]) -> BindingFunction:
    """
    The analytic binding of a statistic set under a model.

    Raises:
        DomainError: If no closed-form limit is known for the combination
    """
    stat_set = resolve_statistic_set(statistics)
    tokens = tuple(stat_set.tokens)
    if model == "ma2":
        if tokens == ("ols_ar2",):
            return ols_ar2_on_ma2_binding()
        return ma2_binding(tokens)
    if model == "ar1":
        return ar1_binding(tokens)
    if model == "gaussian_mean":
        return BindingFunction(
            "gaussian_mean", tokens, _Bound(gaussian_mean_components, tokens), get_region("gaussian_mean")
        )
    raise DomainError(f"No analytic binding for model '{model}' with statistics {list(tokens)}")


def binding_ar1_acov1(theta: float) -> float:
    """
    theta / (1 - theta^2).

    Raises:
        DomainError: If |theta| >= 1
    """
    value = float(theta.values[0] if isinstance(theta, ParameterVector) else theta)
    if not abs(value) < 1.0:
        raise DomainError(f"AR(1) binding needs |theta| < 1, got {value}")
    return value / (1.0 - value * value)


def binding_ma2(theta: ThetaLike, components: Sequence[str] = ("acov0", "acov1", "acov2")) -> np.ndarray:
    """
    Requested MA(2) limits at a feasible theta.

    Example:
        >>> binding_ma2((0.6, 0.2))
        array([1.4 , 0.72, 0.2 ])
    """
    return ma2_binding(components)(theta)


def binding_ols_ar2_on_ma2(theta: ThetaLike) -> np.ndarray:
    """
    (beta1, beta2) limit of the AR(2) OLS fit at a feasible MA(2) theta.

    Raises:
        DomainError: Outside the region
        DegenerateDesignError: If g0 - g1^2 / g0 = 0
    """
    values = get_region("ma2").validate(theta)
    g0, g1, _ = ma2_components(values[None, :], ("acov0", "acov1", "acov2"))[0]
    if g0 - g1 * g1 / g0 == 0.0:
        raise DegenerateDesignError(f"Singular AR(2) limit at theta={values.tolist()}")
    return ols_ar2_on_ma2_rows(values[None, :])[0]


def probe_continuity(binding: BindingFunction, points, h: float = 1e-6) -> np.ndarray:
    """
    Largest finite-difference increment ratio ||b(theta + h e_k) - b(theta)|| / h
    over coordinates k, per point.

    Bounded ratios as h shrinks indicate a continuous (locally Lipschitz) map.
    """
    rows = _rows(points, binding.dim)
    base = binding.evaluate_rows(rows)
    ratios = np.zeros(rows.shape[0])
    for k in range(binding.dim):
        shifted = rows.copy()
        shifted[:, k] += h
        increments = np.linalg.norm(binding.evaluate_rows(shifted) - base, axis=1) / h
        ratios = np.maximum(ratios, increments)
    return ratios
