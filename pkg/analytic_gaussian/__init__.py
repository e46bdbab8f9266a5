"""
Analytic Gaussian-mean example: pseudo-posterior, tail probabilities and
the sequential-limit sweep.
"""

from .pseudo_posterior import (
    ORDERS,
    SWEEP_COLUMNS,
    PseudoPosterior,
    SweepResult,
    TailQuery,
    erf,
    observed_mean,
    pseudo_posterior_params,
    sequential_limit_sweep,
    tail_prob_cdf_oracle,
    tail_prob_erf,
    x_terms,
)

__all__ = [
    'ORDERS',
    'SWEEP_COLUMNS',
    'PseudoPosterior',
    'SweepResult',
    'TailQuery',
    'erf',
    'observed_mean',
    'pseudo_posterior_params',
    'sequential_limit_sweep',
    'tail_prob_cdf_oracle',
    'tail_prob_erf',
    'x_terms',
]
