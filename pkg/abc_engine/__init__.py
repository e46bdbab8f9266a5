"""
ABC Engine

Rejection, kernel and auxiliary-criterion ABC, the distances they use,
tolerance selection, and posterior summaries.
"""

from .config import AbcConfig, quantile_count
from .distances import DISTANCE_KINDS, DistanceSpec, compute_distance
from .posterior import (
    KdeEstimate,
    Posterior,
    PosteriorSummary,
    concentration_probability,
    kde_marginal,
    posterior_mode,
    posterior_summaries,
)
from .samplers import (
    ProposalBatch,
    accept_draws,
    kernel_acceptance_probability,
    posterior_from_distances,
    run_kernel_abc,
    run_rejection_abc,
    select_quantile_tolerance,
    simulate_proposals,
)
from .summarisers import build_summariser

__all__ = [
    'AbcConfig',
    'quantile_count',
    'DISTANCE_KINDS',
    'DistanceSpec',
    'compute_distance',
    'KdeEstimate',
    'Posterior',
    'PosteriorSummary',
    'concentration_probability',
    'kde_marginal',
    'posterior_mode',
    'posterior_summaries',
    'ProposalBatch',
    'accept_draws',
    'kernel_acceptance_probability',
    'posterior_from_distances',
    'run_kernel_abc',
    'run_rejection_abc',
    'select_quantile_tolerance',
    'simulate_proposals',
    'build_summariser',
]
