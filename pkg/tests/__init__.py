"""
Tests for the ABC Consistency Toolkit

Unit and integration tests for every package:
- series_models, summaries
- abc_engine, binding, diagnostics, analytic_gaussian
- utils (config_loader, retry_utils, rng, parallel, io_utils)
- app and experiments (command line)

Acceptance tests reproducing the reference experiments are marked
``slow`` and ``acceptance``.
"""

__version__ = "1.0.0"
