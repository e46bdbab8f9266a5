"""
Experiment plumbing for the command line: configuration merging, run
manifests and the command runners.
"""

from .config import COMMANDS, ExperimentConfig, load_experiment_config, read_experiment_file
from .manifest import RunManifest, RunRecorder, library_versions, write_manifest
from .commands import (
    COMMAND_RUNNERS,
    cmd_abc_run,
    cmd_analytic_sweep,
    cmd_diagnose_augment,
    cmd_diagnose_injectivity,
    cmd_lv_study,
    run_experiment,
)

__all__ = [
    'COMMANDS',
    'ExperimentConfig',
    'load_experiment_config',
    'read_experiment_file',
    'RunManifest',
    'RunRecorder',
    'library_versions',
    'write_manifest',
    'COMMAND_RUNNERS',
    'cmd_abc_run',
    'cmd_analytic_sweep',
    'cmd_diagnose_augment',
    'cmd_diagnose_injectivity',
    'cmd_lv_study',
    'run_experiment',
]
