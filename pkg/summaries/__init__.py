"""
Summaries

Autocovariances, raw moments, the AR(2) OLS auxiliary criterion and the LV
mean/variance statistics, plus the statistic-set recipes built from them.
"""

from .types import AuxiliaryEstimate, SummaryVector
from .moments import autocov, lv_olstats, sample_mean, sample_third_moment
from .ols import ols_ar2_criterion, ols_ar2_criterion_gradient, ols_ar2_estimate
from .descriptors import (
    NAMED_SETS,
    StatisticDescriptor,
    StatisticSet,
    evaluate_statistic_set,
    named_statistic_set,
    resolve_statistic_set,
)

__all__ = [
    'AuxiliaryEstimate',
    'SummaryVector',
    'autocov',
    'lv_olstats',
    'sample_mean',
    'sample_third_moment',
    'ols_ar2_criterion',
    'ols_ar2_criterion_gradient',
    'ols_ar2_estimate',
    'NAMED_SETS',
    'StatisticDescriptor',
    'StatisticSet',
    'evaluate_statistic_set',
    'named_statistic_set',
    'resolve_statistic_set',
]
