"""
Diagnostics

Statistic-augmentation jump diagnostics and consistency sweeps over sample sizes.
"""

from .augmentation import (
    PRESET_PLANS,
    AugmentationPlan,
    AugmentationReport,
    AugmentationStep,
    detect_jump,
    plan_from_preset,
    run_augmentation_sequence,
    settled_at,
)
from .consistency import ConsistencyProbe, consistency_sweep

__all__ = [
    'PRESET_PLANS',
    'AugmentationPlan',
    'AugmentationReport',
    'AugmentationStep',
    'detect_jump',
    'plan_from_preset',
    'run_augmentation_sequence',
    'settled_at',
    'ConsistencyProbe',
    'consistency_sweep',
]
