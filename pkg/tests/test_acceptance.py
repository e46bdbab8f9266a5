"""
Acceptance Tests

Larger runs that reproduce the qualitative behaviour the toolkit exists to
show: concentration under an identifying statistic and its failure under a
non-identifying one, the settling of an augmentation ladder, simulated
one-to-one verification, the closed-form kernel posterior, the noise floor
of the raw-path distance and the nested limits of the Gaussian-mean tail
probability.

Run with: pytest -m acceptance
"""

import numpy as np
import pytest

from abc_engine import AbcConfig, DistanceSpec, run_kernel_abc, run_rejection_abc
from analytic_gaussian import ORDERS, pseudo_posterior_params, sequential_limit_sweep
from binding import ma2_binding, solve_preimage, verify_one_to_one
from diagnostics import consistency_sweep, plan_from_preset, run_augmentation_sequence
from series_models import AR1Model, GaussianMeanModel, LotkaVolterraModel, MA2Model, default_lv_config

THETA0 = (0.6, 0.2)
SPURIOUS_ROOT = (0.5453, 0.3204)
SIZES = [100, 500, 5000]

# 100 of 50000 prior draws; a 0.1-disc holds about 393 of them in expectation
CONCENTRATION_CONFIG = AbcConfig(n_draws=50000, seed=21, quantile=0.002, chunk_size=1000)


@pytest.mark.slow
@pytest.mark.acceptance
class TestConcentrationContrast:
    """Identifying and non-identifying MA(2) statistics as T grows."""

    def test_eta2_concentrates(self):
        """Test that the eta2 tail probability falls strictly and ends below 0.05."""
        sweep = consistency_sweep(MA2Model(), THETA0, "eta2", SIZES, 0.1, CONCENTRATION_CONFIG)

        assert sweep.no_acceptances == [False, False, False]
        assert sweep.is_decreasing()
        assert sweep.probabilities[-1] < 0.05

    def test_eta1_keeps_mass_at_spurious_root(self):
        """Test that eta1 leaves mass away from theta0 and around the second root."""
        sweep = consistency_sweep(MA2Model(), THETA0, "eta1", SIZES, 0.1, CONCENTRATION_CONFIG)

        assert sweep.probabilities[-1] > 0.2
        thetas = sweep.posteriors[-1].thetas
        near_root = np.linalg.norm(thetas - np.asarray(SPURIOUS_ROOT), axis=1) <= 0.05
        assert near_root.mean() >= 0.1


@pytest.mark.slow
@pytest.mark.acceptance
class TestAugmentationLadders:
    """Preset augmentation plans at T=5000."""

    def test_moments_ladder_settles_after_eta2(self):
        """Test that no step after eta2 is flagged and eta2 centres on theta0."""
        config = AbcConfig(n_draws=50000, seed=23, quantile=0.01, chunk_size=1000)
        plan = plan_from_preset("moments-ladder", MA2Model(), config, THETA0, 5000)
        report = run_augmentation_sequence(plan, threshold=3.0)

        assert [s.statistics for s in report.steps] == ["eta1", "eta2", "eta3", "eta4", "eta5"]
        assert [s.jump_flag for s in report.steps[2:]] == [False, False, False]
        assert all(m >= 0.0 for m in report.jump_metrics)
        np.testing.assert_allclose(report.steps[1].summary.mode, THETA0, atol=0.1)

    def test_lags_third_ladder_reports_every_step(self):
        """Test that every step of the lag-and-third-moment plan accepts the quantile share."""
        config = AbcConfig(n_draws=50000, seed=23, quantile=0.01, chunk_size=1000)
        plan = plan_from_preset("lags-third-ladder", MA2Model(), config, THETA0, 5000)
        report = run_augmentation_sequence(plan, threshold=3.0)

        assert [s.statistics for s in report.steps] == ["eta1", "eta6", "eta7", "eta8"]
        assert [s.n_accepted for s in report.steps] == [500, 500, 500, 500]
        assert all(np.isfinite(m) and m >= 0.0 for m in report.jump_metrics)


@pytest.mark.slow
@pytest.mark.acceptance
class TestSimulatedVerification:
    """One-to-one verification from long simulated paths."""

    def test_eta1_twin_roots_collide(self):
        """Test that eta1 is declared non-injective with the twin roots as witness."""
        twin = min(
            (s.values for s in solve_preimage(ma2_binding(("acov0", "acov1")), [1.4, 0.72]).solutions),
            key=lambda v: v[0],
        )
        points = [THETA0, twin, (0.0, 0.0), (-0.5, 0.3)]
        verdict = verify_one_to_one(MA2Model(), "eta1", points, 10 ** 6, seed=43)

        assert verdict.injective is False
        first, second = sorted((verdict.witness[0].values, verdict.witness[1].values), key=lambda v: v[0])
        np.testing.assert_allclose(first, SPURIOUS_ROOT, atol=0.05)
        np.testing.assert_allclose(second, THETA0, atol=0.05)

    def test_ar1_acov1_distinct(self):
        """Test that 20 spread AR(1) parameters give pairwise distinct lag-1 autocovariances."""
        points = np.linspace(-0.9, 0.9, 20)
        verdict = verify_one_to_one(AR1Model(), "acov1", points, 10 ** 6, seed=47)

        assert verdict.injective is True
        assert verdict.collisions == []


@pytest.mark.slow
@pytest.mark.acceptance
class TestLotkaVolterra:
    """Deterministic against noise-matched simulation of the LV system."""

    def test_raw_path_noise_floor(self):
        """Test that noiseless simulations never come within 0.4 of noisy LV data."""
        lv_config = default_lv_config(n_points=500)
        observed = LotkaVolterraModel(lv_config, "noise_matched").observe(lv_config.theta, None, 13)
        model = LotkaVolterraModel(lv_config, "deterministic")
        config = AbcConfig(n_draws=10000, seed=13, epsilon=0.4, chunk_size=500)
        posterior = run_rejection_abc(observed, model, None, DistanceSpec("lv_raw_path"), config)
        assert posterior.no_acceptances
        assert posterior.metadata["min_distance"] > 0.4

    def test_noise_matched_lv_recovers_theta(self):
        """Test that noise-matched simulation with LV summaries centres within 0.1 of theta0."""
        lv_config = default_lv_config(n_points=2000)
        model = LotkaVolterraModel(lv_config, "noise_matched")
        observed = model.observe(lv_config.theta, None, 17)
        config = AbcConfig(n_draws=10000, seed=17, quantile=0.01, chunk_size=500)
        posterior = run_rejection_abc(observed, model, "lv_olstats", None, config)
        np.testing.assert_allclose(posterior.thetas.mean(axis=0), [1.0, 1.0], atol=0.1)


@pytest.mark.slow
@pytest.mark.acceptance
class TestGaussianMean:
    """Closed-form Gaussian-mean references."""

    def test_kernel_matches_closed_form(self):
        """Test kernel ABC against the normal pseudo-posterior of the Gaussian mean."""
        model = GaussianMeanModel()
        observed = model.observe(1.0, 1000, 8)
        eta = float(observed.observations.mean())
        config = AbcConfig(n_draws=100000, seed=8, epsilon=0.05, chunk_size=5000)
        posterior = run_kernel_abc(observed, model, "mean", 0.05, config)
        # exp(-u^2 / eps^2) is a normal kernel with standard deviation eps / sqrt(2)
        expected = pseudo_posterior_params(eta, 1000, 0.05 / np.sqrt(2.0))
        assert posterior.n_accepted > 200
        assert posterior.thetas.mean() == pytest.approx(expected.mean, abs=0.02)
        assert posterior.thetas.std() == pytest.approx(expected.std, rel=0.15)

    def test_both_limit_orders_converge(self):
        """Test that both nested limits reach a vanishing tail at the grid corner."""
        for order in ORDERS:
            result = sequential_limit_sweep(
                order, 0.0, 0.1, [1.0, 0.1, 0.01, 0.001], [100, 1000, 10000, 100000, 1000000], seed=3
            )
            assert result.converged
            corner = result.frame.iloc[-1]
            assert corner["prob_paper"] < 1e-3
            assert corner["prob_oracle"] < 1e-3
            assert result.frame["prob_paper"].max() <= np.sqrt(2.0) / 2.0 + 1e-15
