"""
Binding Functions

Analytic large-sample limits b(theta) of the summary statistics, their
preimages, and grid- or simulation-based injectivity checks.
"""

from .functions import (
    MA2_COMPONENTS,
    BindingFunction,
    ar1_binding,
    binding_ar1_acov1,
    binding_for,
    binding_ma2,
    binding_ols_ar2_on_ma2,
    ma2_binding,
    ols_ar2_on_ma2_binding,
    probe_continuity,
)
from .injectivity import InjectivityVerdict, check_injectivity_analytic, reverify_witness
from .preimage import PreimageResult, newton_refine, solve_preimage
from .simulation import SimulatedBinding, simulate_binding, verify_one_to_one

__all__ = [
    'MA2_COMPONENTS',
    'BindingFunction',
    'ar1_binding',
    'binding_ar1_acov1',
    'binding_for',
    'binding_ma2',
    'binding_ols_ar2_on_ma2',
    'ma2_binding',
    'ols_ar2_on_ma2_binding',
    'probe_continuity',
    'InjectivityVerdict',
    'check_injectivity_analytic',
    'reverify_witness',
    'PreimageResult',
    'newton_refine',
    'solve_preimage',
    'SimulatedBinding',
    'simulate_binding',
    'verify_one_to_one',
]
