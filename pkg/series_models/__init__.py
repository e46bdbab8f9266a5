"""
Series Models

Simulators for AR(1), MA(2), i.i.d. Gaussian and Lotka-Volterra data, plus
prior samplers over each model's constraint region.
"""

from .types import LvConfig, NoiseSpec, ParameterVector, SeriesSource, TimeSeries
from .regions import Region, get_region
from .processes import simulate_ar1, simulate_iid_normal, simulate_ma2
from .lotka_volterra import integrate_lv, rk4_integrate, simulate_lv_observations
from .priors import PriorSample, draw_prior_sample, sample_prior
from .models import (
    AR1Model,
    GaussianMeanModel,
    LotkaVolterraModel,
    MA2Model,
    SeriesModel,
    default_lv_config,
    get_model,
)

__all__ = [
    'LvConfig',
    'NoiseSpec',
    'ParameterVector',
    'SeriesSource',
    'TimeSeries',
    'Region',
    'get_region',
    'simulate_ar1',
    'simulate_iid_normal',
    'simulate_ma2',
    'integrate_lv',
    'rk4_integrate',
    'simulate_lv_observations',
    'PriorSample',
    'draw_prior_sample',
    'sample_prior',
    'AR1Model',
    'GaussianMeanModel',
    'LotkaVolterraModel',
    'MA2Model',
    'SeriesModel',
    'default_lv_config',
    'get_model',
]
