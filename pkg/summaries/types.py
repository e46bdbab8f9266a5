"""Value types produced by the summary statistics."""

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from utils.exceptions import DomainError


@dataclass(frozen=True, eq=False)
class SummaryVector:
    """
    A statistic value and the recipe that produced it.

    Attributes:
        values: d finite reals
        produced_by: Name of the StatisticSet
        series_length: Length T of the series it was computed on
        labels: Component labels, in order
    """

    values: np.ndarray
    produced_by: str
    series_length: int
    labels: Tuple[str, ...] = ()

    def __post_init__(self):
        values = np.atleast_1d(np.asarray(self.values, dtype=float))
        if not np.all(np.isfinite(values)):
            raise DomainError(f"Summary '{self.produced_by}' has non-finite entries: {values.tolist()}")
        if self.labels and len(self.labels) != values.shape[0]:
            raise DomainError("Summary labels do not match its dimension")
        object.__setattr__(self, "values", values)

    @property
    def dimension(self) -> int:
        return int(self.values.shape[0])

    def to_dict(self) -> Dict[str, object]:
        return {
            "produced_by": self.produced_by,
            "series_length": self.series_length,
            "labels": list(self.labels),
            "values": self.values.tolist(),
        }


@dataclass(frozen=True, eq=False)
class AuxiliaryEstimate:
    """Exact minimiser of an auxiliary criterion and the criterion value there."""

    beta: np.ndarray
    criterion_value_at_min: float
