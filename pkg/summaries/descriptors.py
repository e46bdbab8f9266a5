"""
Statistic descriptors and named statistic sets.

A StatisticSet is an ordered recipe; evaluating it concatenates the values of
its descriptors in order. Sets can be built from CLI tokens
(``acov0``, ``mean``, ``third``, ``ols_ar2``, ``lv_mean1``, ...) or by name
(``eta1`` .. ``eta8``, ``mean``, ``ols_ar2``, ``lv_mean``, ``lv_var``, ``lv_olstats``).
"""

import logging
import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from series_models.types import TimeSeries
from utils.exceptions import DomainError

from .moments import SeriesLike, as_bivariate_array, as_scalar_array, autocov
from .ols import ols_ar2_estimate
from .types import SummaryVector

logger = logging.getLogger(__name__)

KINDS = ("autocov", "mean", "third_moment", "ols_ar2", "lv_mean", "lv_var")
_TOKEN = re.compile(r"^(acov|lv_mean|lv_var)(\d+)$")


@dataclass(frozen=True)
class StatisticDescriptor:
    """
    One summary statistic.

    Attributes:
        kind: One of autocov, mean, third_moment, ols_ar2, lv_mean, lv_var
        index: Lag for autocov; coordinate 1 or 2 for lv_mean / lv_var
    """

    kind: str
    index: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"Unknown statistic kind: {self.kind}")
        if self.kind == "autocov":
            if self.index is None or self.index < 0:
                raise DomainError(f"Autocovariance lag must be >= 0, got {self.index}")
        elif self.kind in ("lv_mean", "lv_var"):
            if self.index not in (1, 2):
                raise DomainError(f"LV statistic index must be 1 or 2, got {self.index}")
        elif self.index is not None:
            raise DomainError(f"Statistic '{self.kind}' takes no index")

    @property
    def dimension(self) -> int:
        return 2 if self.kind == "ols_ar2" else 1

    @property
    def is_bivariate(self) -> bool:
        return self.kind in ("lv_mean", "lv_var")

    @property
    def token(self) -> str:
        if self.kind == "autocov":
            return f"acov{self.index}"
        if self.kind in ("lv_mean", "lv_var"):
            return f"{self.kind}{self.index}"
        return {"mean": "mean", "third_moment": "third", "ols_ar2": "ols_ar2"}[self.kind]

    @property
    def labels(self) -> Tuple[str, ...]:
        return ("ols_beta1", "ols_beta2") if self.kind == "ols_ar2" else (self.token,)

    @classmethod
    def from_token(cls, token: str) -> "StatisticDescriptor":
        """
        Parse a CLI token.

        Raises:
            DomainError: If the token is not recognised
        """
        token = token.strip()
        simple = {"mean": "mean", "third": "third_moment", "third_moment": "third_moment", "ols_ar2": "ols_ar2"}
        if token in simple:
            return cls(simple[token])
        match = _TOKEN.match(token)
        if not match:
            raise DomainError(f"Unknown statistic token: '{token}'")
        prefix, number = match.group(1), int(match.group(2))
        return cls("autocov" if prefix == "acov" else prefix, number)

    def evaluate(self, data: np.ndarray) -> np.ndarray:
        """Value(s) of this statistic on a raw path."""
        if self.is_bivariate:
            x = as_bivariate_array(data)
            column = x[:, self.index - 1]
            return np.array([column.mean() if self.kind == "lv_mean" else column.var()])
        y = as_scalar_array(data)
        if self.kind == "autocov":
            return np.array([autocov(y, self.index)])
        if self.kind == "mean":
            return np.array([y.mean()])
        if self.kind == "third_moment":
            return np.array([np.mean(y * y * y)])
        return ols_ar2_estimate(y).beta


@dataclass(frozen=True)
class StatisticSet:
    """
    An ordered, nonempty list of distinct descriptors.

    Attributes:
        name: Set name used in reports ("eta1", "ols_ar2", ...)
        descriptors: Descriptors in evaluation order
    """

    name: str
    descriptors: Tuple[StatisticDescriptor, ...]

    def __post_init__(self):
        object.__setattr__(self, "descriptors", tuple(self.descriptors))
        if not self.descriptors:
            raise DomainError("A statistic set needs at least one descriptor")
        if len(set(self.descriptors)) != len(self.descriptors):
            raise DomainError(f"Statistic set '{self.name}' repeats a descriptor")
        if len({d.is_bivariate for d in self.descriptors}) > 1:
            raise DomainError(f"Statistic set '{self.name}' mixes scalar and bivariate statistics")

    @property
    def dimension(self) -> int:
        return sum(d.dimension for d in self.descriptors)

    @property
    def tokens(self) -> List[str]:
        return [d.token for d in self.descriptors]

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(label for d in self.descriptors for label in d.labels)

    @property
    def is_bivariate(self) -> bool:
        return self.descriptors[0].is_bivariate

    @property
    def max_lag(self) -> int:
        lags = [d.index for d in self.descriptors if d.kind == "autocov"]
        return max(lags) if lags else 0

    def is_prefix_of(self, other: "StatisticSet") -> bool:
        n = len(self.descriptors)
        return len(other.descriptors) >= n and other.descriptors[:n] == self.descriptors

    def columns_in(self, other: "StatisticSet") -> np.ndarray:
        """Column indices of this set's components inside ``other``'s output."""
        offsets: Dict[StatisticDescriptor, int] = {}
        position = 0
        for d in other.descriptors:
            offsets[d] = position
            position += d.dimension
        columns = []
        for d in self.descriptors:
            if d not in offsets:
                raise DomainError(f"Statistic '{d.token}' is not part of set '{other.name}'")
            columns.extend(range(offsets[d], offsets[d] + d.dimension))
        return np.array(columns, dtype=int)

    def values(self, data: np.ndarray) -> np.ndarray:
        """Concatenated values on a raw path (no TimeSeries wrapping)."""
        return np.concatenate([d.evaluate(data) for d in self.descriptors])

    @classmethod
    def from_names(cls, names: Iterable[str], name: Optional[str] = None) -> "StatisticSet":
        tokens = list(names)
        descriptors = tuple(StatisticDescriptor.from_token(t) for t in tokens)
        return cls(name or "+".join(tokens), descriptors)


def _acov(*lags: int) -> Tuple[StatisticDescriptor, ...]:
    return tuple(StatisticDescriptor("autocov", lag) for lag in lags)


_MEAN = StatisticDescriptor("mean")
_THIRD = StatisticDescriptor("third_moment")

NAMED_SETS: Dict[str, Tuple[StatisticDescriptor, ...]] = {
    "eta1": _acov(0, 1),
    "eta2": _acov(0, 1, 2),
    "eta3": _acov(0, 1, 2, 3),
    "eta4": _acov(0, 1, 2, 3) + (_MEAN,),
    "eta5": _acov(0, 1, 2, 3) + (_MEAN, _THIRD),
    "eta6": _acov(0, 1, 3),
    "eta7": _acov(0, 1, 3) + (_THIRD,),
    "eta8": _acov(0, 1, 3) + (_THIRD,) + _acov(2),
    "mean": (_MEAN,),
    "ols_ar2": (StatisticDescriptor("ols_ar2"),),
    "lv_mean": (StatisticDescriptor("lv_mean", 1), StatisticDescriptor("lv_mean", 2)),
    "lv_var": (StatisticDescriptor("lv_var", 1), StatisticDescriptor("lv_var", 2)),
    "lv_olstats": (
        StatisticDescriptor("lv_mean", 1), StatisticDescriptor("lv_mean", 2),
        StatisticDescriptor("lv_var", 1), StatisticDescriptor("lv_var", 2),
    ),
}


def named_statistic_set(name: str) -> StatisticSet:
    """
    Resolve a set name, or a comma/plus separated token list.

    Example:
        >>> named_statistic_set("eta5").dimension
        5
        >>> named_statistic_set("acov0,acov1").tokens
        ['acov0', 'acov1']
    """
    if name in NAMED_SETS:
        return StatisticSet(name, NAMED_SETS[name])
    tokens = [t for t in re.split(r"[,+\s]+", name) if t]
    if not tokens:
        raise DomainError(f"Unknown statistic set: '{name}'")
    return StatisticSet.from_names(tokens, name=name)


def resolve_statistic_set(spec) -> StatisticSet:
    """Accept a StatisticSet, a set name, or a list of tokens."""
    if isinstance(spec, StatisticSet):
        return spec
    if isinstance(spec, str):
        return named_statistic_set(spec)
    return StatisticSet.from_names(list(spec))


def evaluate_statistic_set(stat_set: StatisticSet, series: SeriesLike) -> SummaryVector:
    """
    Evaluate every descriptor on ``series`` and concatenate in order.

    Raises:
        DomainError: If the set and the series are incompatible
    """
    data = series.observations if isinstance(series, TimeSeries) else np.asarray(series, dtype=float)
    if not stat_set.is_bivariate:
        needed = stat_set.max_lag + 1
        if any(d.kind == "ols_ar2" for d in stat_set.descriptors):
            needed = max(needed, 5)
        if data.ndim == 1 and data.shape[0] < needed:
            raise DomainError(f"Set '{stat_set.name}' needs a series of length >= {needed}, got {data.shape[0]}")
    return SummaryVector(stat_set.values(data), stat_set.name, int(data.shape[0]), stat_set.labels)
