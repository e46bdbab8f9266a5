"""
Unit Tests for the diagnostics

Tests for the jump metric, augmentation plans and consistency sweeps.
"""

import numpy as np
import pytest

from abc_engine import AbcConfig, Posterior, PosteriorSummary, posterior_summaries, run_rejection_abc
from diagnostics import (
    AugmentationPlan,
    AugmentationStep,
    consistency_sweep,
    detect_jump,
    plan_from_preset,
    run_augmentation_sequence,
    settled_at,
)
from series_models import MA2Model
from utils.exceptions import DomainError


def _summary(mode, std):
    mode = np.asarray(mode, dtype=float)
    return PosteriorSummary(mode, np.asarray(std, dtype=float), mode, 100)


def _step(index, flag):
    return AugmentationStep(index, f"set{index}", 0.1, _summary([0.0], [1.0]), jump_flag=flag)


def _posterior(thetas):
    n = thetas.shape[0]
    return Posterior(thetas, np.zeros(n), np.arange(n), 0.0, 10 * n, "ma2")


@pytest.mark.unit
class TestDetectJump:
    """Test suite for detect_jump."""

    def test_identical_summaries(self):
        """Test that identical posteriors give a zero, unflagged metric."""
        summary = _summary([0.6, 0.2], [0.05, 0.05])
        assert detect_jump(summary, summary, threshold=3.0) == (0.0, False)

    def test_shift_in_pooled_units(self):
        """Test the mode shift divided by the pooled std."""
        metric, flag = detect_jump(_summary([0.0, 0.0], [0.1, 0.1]), _summary([0.5, 0.0], [0.1, 0.1]), threshold=3.0)
        assert metric == pytest.approx(5.0)
        assert flag

    def test_below_threshold(self):
        """Test that a small shift is not flagged."""
        metric, flag = detect_jump(_summary([0.0], [0.1]), _summary([0.2], [0.1]), threshold=3.0)
        assert metric == pytest.approx(2.0)
        assert not flag

    def test_zero_spread(self):
        """Test that a zero pooled std with a shift is an infinite jump."""
        metric, flag = detect_jump(_summary([0.0], [0.0]), _summary([0.1], [0.0]), threshold=3.0)
        assert np.isinf(metric)
        assert flag

    def test_dimension_mismatch(self):
        """Test that posteriors of different dimension are refused."""
        with pytest.raises(DomainError):
            detect_jump(_summary([0.0], [0.1]), _summary([0.0, 0.0], [0.1, 0.1]), threshold=3.0)

    def test_mean_used_without_mode(self):
        """Test that the mean stands in for a missing mode."""
        prev = PosteriorSummary(np.array([0.0]), np.array([0.5]), None, 1)
        curr = PosteriorSummary(np.array([1.0]), np.array([0.5]), None, 1)
        assert detect_jump(prev, curr, threshold=3.0) == (pytest.approx(2.0), False)

    @pytest.mark.parametrize("reorder", ["rows", "columns"])
    def test_metric_ignores_ordering(self, reorder):
        """Test that shuffling draws or relabelling coordinates leaves the metric unchanged."""
        rng = np.random.default_rng(5)
        before = rng.normal([0.6, 0.2], [0.05, 0.08], size=(400, 2))
        after = rng.normal([0.5, 0.35], [0.04, 0.06], size=(400, 2))
        metric, _ = detect_jump(posterior_summaries(_posterior(before)), posterior_summaries(_posterior(after)), threshold=3.0)

        if reorder == "rows":
            before, after = before[rng.permutation(400)], after[rng.permutation(400)]
        else:
            before, after = before[:, ::-1], after[:, ::-1]
        shuffled, _ = detect_jump(
            posterior_summaries(_posterior(np.ascontiguousarray(before))),
            posterior_summaries(_posterior(np.ascontiguousarray(after))),
            threshold=3.0,
        )
        assert shuffled == pytest.approx(metric, rel=1e-9)
        assert metric > 0.0


@pytest.mark.unit
class TestSettledAt:
    """Test suite for settled_at."""

    def test_settles_after_last_flag(self):
        """Test that the set reached by the last flagged jump is reported."""
        steps = [_step(0, None), _step(1, True), _step(2, False)]
        assert settled_at(steps) == "set1"

    def test_flag_on_last_step(self):
        """Test that a flag on the final step means nothing settled."""
        steps = [_step(0, None), _step(1, False), _step(2, True)]
        assert settled_at(steps) is None

    def test_no_flags(self):
        """Test that a sequence without jumps has no settling point."""
        assert settled_at([_step(0, None), _step(1, False)]) is None


@pytest.mark.unit
class TestAugmentationPlan:
    """Test suite for AugmentationPlan."""

    def test_sets_must_nest(self, small_abc_config):
        """Test that a set which does not extend its predecessor is refused."""
        with pytest.raises(DomainError):
            AugmentationPlan("bad", MA2Model(), ["eta2", "eta1"], small_abc_config, theta0=(0.6, 0.2), series_length=100)

    def test_needs_data(self, small_abc_config):
        """Test that a plan without data or theta0 is refused."""
        with pytest.raises(DomainError):
            AugmentationPlan("bare", MA2Model(), ["eta1"], small_abc_config)

    def test_unknown_preset(self, small_abc_config):
        """Test that unknown preset names are refused."""
        with pytest.raises(DomainError):
            plan_from_preset("ladder9", MA2Model(), small_abc_config, (0.6, 0.2), 100)

    def test_preset_sets(self, small_abc_config):
        """Test the statistic sets of a preset."""
        plan = plan_from_preset("lags-ladder", MA2Model(), small_abc_config, (0.6, 0.2), 100)
        assert [s.name for s in plan.sets] == ["eta1", "eta6", "eta7"]
        assert plan.final_set.name == "eta7"


@pytest.mark.unit
class TestAugmentationSequence:
    """Test suite for run_augmentation_sequence."""

    def test_steps_match_separate_runs(self, ma2_observed, small_abc_config):
        """Test that every step accepts the same draws as a standalone run."""
        plan = AugmentationPlan("pair", MA2Model(), ["eta1", "eta2"], small_abc_config, observed=ma2_observed)
        report = run_augmentation_sequence(plan, threshold=3.0)
        assert [s.statistics for s in report.steps] == ["eta1", "eta2"]
        assert report.steps[0].jump_metric is None
        assert report.steps[1].jump_metric >= 0.0
        for step in report.steps:
            alone = run_rejection_abc(ma2_observed, MA2Model(), step.statistics, None, small_abc_config)
            np.testing.assert_array_equal(step.posterior.draw_indices, alone.draw_indices)
            assert step.n_accepted == 100

    def test_report_tables(self, ma2_observed, small_abc_config):
        """Test the CSV and JSON forms of a report."""
        plan = AugmentationPlan("pair", MA2Model(), ["eta1", "eta2"], small_abc_config, observed=ma2_observed)
        report = run_augmentation_sequence(plan, threshold=3.0)
        frame = report.to_frame()
        assert list(frame["statistics"]) == ["eta1", "eta2"]
        assert {"mode1", "mode2", "std1", "std2", "jump_metric", "jump_flag"} <= set(frame.columns)
        payload = report.to_dict()
        assert payload["plan"] == "pair"
        assert len(payload["steps"]) == 2


@pytest.mark.unit
class TestConsistencySweep:
    """Test suite for consistency_sweep."""

    def test_sweep_shape(self, small_abc_config):
        """Test one probability per sample size, each in [0, 1]."""
        sweep = consistency_sweep(MA2Model(), (0.6, 0.2), "eta2", [100, 1000], 0.2, small_abc_config)
        assert sweep.sizes == [100, 1000]
        assert len(sweep.probabilities) == 2
        assert all(0.0 <= p <= 1.0 for p in sweep.probabilities)
        assert list(sweep.to_frame()["T"]) == [100, 1000]
        assert sweep.posteriors[1].n_accepted == 100

    def test_empty_posterior_is_recorded(self):
        """Test that a size with no acceptances gives NaN entries instead of an error."""
        config = AbcConfig(n_draws=50, seed=1, epsilon=1e-12)
        sweep = consistency_sweep(MA2Model(), (0.6, 0.2), "eta2", [100], 0.1, config)

        assert sweep.no_acceptances == [True]
        assert np.isnan(sweep.probabilities[0])
        assert np.isnan(sweep.std_errors[0])
        assert np.all(np.isnan(sweep.posterior_stds[0]))
        assert sweep.posteriors[0].no_acceptances
        frame = sweep.to_frame()
        assert bool(frame["no_acceptances"].iloc[0])
        assert sweep.to_dict()["no_acceptances"] == [True]

    def test_sizes_must_ascend(self, small_abc_config):
        """Test that sample sizes must be strictly ascending."""
        with pytest.raises(DomainError):
            consistency_sweep(MA2Model(), (0.6, 0.2), "eta2", [500, 100], 0.1, small_abc_config)

    def test_delta_positive(self, small_abc_config):
        """Test that delta must be positive."""
        with pytest.raises(DomainError):
            consistency_sweep(MA2Model(), (0.6, 0.2), "eta2", [100], 0.0, small_abc_config)

    def test_kernel_needs_epsilon(self, small_abc_config):
        """Test that kernel sampling refuses quantile settings."""
        with pytest.raises(DomainError):
            consistency_sweep(MA2Model(), (0.6, 0.2), "mean", [100], 0.1, small_abc_config, sampler="kernel")

    def test_unknown_sampler(self):
        """Test that unknown samplers are refused."""
        config = AbcConfig(n_draws=10, seed=1, quantile=0.5)
        with pytest.raises(DomainError):
            consistency_sweep(MA2Model(), (0.6, 0.2), "eta2", [100], 0.1, config, sampler="smc")
