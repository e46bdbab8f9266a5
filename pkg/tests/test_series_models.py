"""
Unit Tests for the series models

Tests for parameter types, constraint regions, simulators, priors and the
Lotka-Volterra integrator.
"""

import numpy as np
import pytest

from series_models import (
    AR1Model,
    GaussianMeanModel,
    LotkaVolterraModel,
    LvConfig,
    MA2Model,
    ParameterVector,
    TimeSeries,
    default_lv_config,
    get_model,
    get_region,
    integrate_lv,
    sample_prior,
    simulate_ar1,
    simulate_lv_observations,
    simulate_ma2,
)
from series_models.priors import draw_prior_indices
from utils.exceptions import DomainError
from utils.rng import make_generator


@pytest.mark.unit
class TestParameterVector:
    """Test suite for ParameterVector."""

    def test_of_scalar(self):
        """Test building a vector from a scalar."""
        vector = ParameterVector.of(0.5, "ar1")
        assert vector.values == (0.5,)
        assert vector.dim == 1

    def test_distance(self):
        """Test Euclidean distance between vectors."""
        a = ParameterVector.of((0.0, 0.0), "ma2")
        b = ParameterVector.of((3.0, 4.0), "ma2")
        assert a.distance_to(b) == pytest.approx(5.0)

    def test_empty_rejected(self):
        """Test that an empty vector is refused."""
        with pytest.raises(DomainError):
            ParameterVector((), "ar1")


@pytest.mark.unit
class TestTimeSeries:
    """Test suite for TimeSeries."""

    def test_rejects_non_finite(self):
        """Test that NaN observations are refused."""
        with pytest.raises(DomainError):
            TimeSeries(np.array([1.0, np.nan]))

    def test_rejects_three_columns(self):
        """Test that only scalar or bivariate series are accepted."""
        with pytest.raises(DomainError):
            TimeSeries(np.zeros((4, 3)))

    def test_to_frame_columns(self):
        """Test the CSV layout of scalar and bivariate series."""
        assert list(TimeSeries(np.arange(3.0)).to_frame().columns) == ["t", "x1"]
        assert list(TimeSeries(np.zeros((3, 2))).to_frame().columns) == ["t", "x1", "x2"]

    def test_observations_read_only(self):
        """Test that stored observations cannot be modified."""
        series = TimeSeries(np.arange(3.0))
        with pytest.raises(ValueError):
            series.observations[0] = 10.0


@pytest.mark.unit
class TestRegions:
    """Test suite for constraint regions."""

    def test_ma2_triangle(self):
        """Test membership of the MA(2) invertibility triangle."""
        region = get_region("ma2")
        inside = region.contains(np.array([[0.6, 0.2], [0.0, 0.0], [1.0, 2.0]]))
        outside = region.contains(np.array([[2.5, 0.0], [-1.0, -0.5], [1.0, -0.5]]))
        assert inside.all()
        assert not outside.any()

    def test_validate_raises_outside(self):
        """Test that validate refuses infeasible parameters."""
        with pytest.raises(DomainError):
            get_region("ar1").validate(1.0)

    def test_wrong_dimension(self):
        """Test that a dimension mismatch is a DomainError."""
        with pytest.raises(DomainError):
            get_region("ma2").as_rows(np.zeros((2, 3)))

    def test_unknown_region(self):
        """Test that unknown region tags are refused."""
        with pytest.raises(DomainError):
            get_region("garch")


@pytest.mark.unit
class TestScalarSimulators:
    """Test suite for AR(1), MA(2) and i.i.d. simulators."""

    def test_ar1_deterministic_given_seed(self):
        """Test that equal seeds give equal series."""
        a = simulate_ar1(0.5, 100, seed=4)
        b = simulate_ar1(0.5, 100, seed=4)
        c = simulate_ar1(0.5, 100, seed=5)
        np.testing.assert_array_equal(a.observations, b.observations)
        assert not np.array_equal(a.observations, c.observations)

    def test_ar1_zero_is_innovations(self):
        """Test that theta = 0 returns the raw innovation stream."""
        series = simulate_ar1(0.0, 50, seed=9)
        np.testing.assert_array_equal(series.observations, make_generator(9).standard_normal(50))

    def test_ar1_rejects_unit_root(self):
        """Test that |theta| >= 1 is refused."""
        with pytest.raises(DomainError):
            simulate_ar1(1.0, 100, seed=1)

    def test_ma2_records_source(self):
        """Test that the simulated series remembers theta and seed."""
        series = simulate_ma2((0.6, 0.2), 30, seed=2)
        assert series.length == 30
        assert series.source.kind == "simulated"
        assert series.source.theta.values == (0.6, 0.2)
        assert series.source.seed == 2

    def test_ma2_autocovariances_near_limits(self):
        """Test that long MA(2) series reproduce 1 + t1^2 + t2^2 and t1 (1 + t2)."""
        y = simulate_ma2((0.6, 0.2), 200000, seed=3).observations
        assert np.dot(y, y) / y.size == pytest.approx(1.4, abs=0.03)
        assert np.dot(y[1:], y[:-1]) / y.size == pytest.approx(0.72, abs=0.03)

    def test_ma2_rejects_outside_triangle(self):
        """Test that non-invertible MA(2) parameters are refused."""
        with pytest.raises(DomainError):
            simulate_ma2((1.0, -0.5), 100, seed=1)

    def test_short_series_refused(self):
        """Test the minimum lengths of the simulators."""
        with pytest.raises(DomainError):
            simulate_ma2((0.6, 0.2), 2, seed=1)

    def test_gaussian_mean_model(self):
        """Test that the Gaussian-mean model centres on theta."""
        series = GaussianMeanModel().simulate(2.0, 10000, seed=1)
        assert series.observations.mean() == pytest.approx(2.0, abs=0.05)


@pytest.mark.unit
class TestPriors:
    """Test suite for prior samplers."""

    def test_ma2_prior_inside_triangle(self):
        """Test that every MA(2) prior draw is invertible."""
        draws = np.array([d.values for d in sample_prior("ma2", 2000, seed=3)])
        assert get_region("ma2").contains(draws).all()

    def test_ar1_prior_range(self):
        """Test that AR(1) prior draws lie in (-1, 1)."""
        draws = np.array([d.values for d in sample_prior("ar1", 1000, seed=3)])
        assert np.all(np.abs(draws) < 1.0)

    def test_draw_depends_only_on_index(self):
        """Test that draw i is the same whichever block it is drawn in."""
        full, _ = draw_prior_indices("ma2", range(10), seed=8)
        part, _ = draw_prior_indices("ma2", [5, 7], seed=8)
        np.testing.assert_array_equal(part, full[[5, 7]])

    def test_unknown_model(self):
        """Test that an unknown prior model is refused."""
        with pytest.raises(DomainError):
            sample_prior("garch", 10, seed=1)


@pytest.mark.unit
class TestModels:
    """Test suite for SeriesModel objects."""

    def test_get_model(self):
        """Test model lookup by name."""
        assert isinstance(get_model("ar1"), AR1Model)
        assert isinstance(get_model("ma2"), MA2Model)
        assert isinstance(get_model("lv", mode="deterministic"), LotkaVolterraModel)

    def test_get_model_unknown(self):
        """Test that unknown model names are refused."""
        with pytest.raises(DomainError):
            get_model("garch")

    def test_propose_is_chunk_invariant(self):
        """Test that proposals depend only on (seed, index)."""
        model = MA2Model()
        thetas_all, paths_all = model.propose(list(range(6)), 3, 20)
        thetas_part, paths_part = model.propose([3, 4], 3, 20)
        np.testing.assert_array_equal(thetas_part, thetas_all[3:5])
        np.testing.assert_array_equal(paths_part[1], paths_all[4])

    def test_observe_differs_from_simulate(self):
        """Test that observed data use their own stream."""
        model = MA2Model()
        observed = model.observe((0.6, 0.2), 50, 1)
        simulated = model.simulate((0.6, 0.2), 50, 1)
        assert observed.source.kind == "observed"
        assert not np.array_equal(observed.observations, simulated.observations)

    def test_fixed_length(self):
        """Test that only the LV model imposes its own length."""
        assert MA2Model().fixed_length is None
        assert LotkaVolterraModel(default_lv_config(n_points=100)).fixed_length == 100


@pytest.mark.unit
class TestLotkaVolterra:
    """Test suite for the Lotka-Volterra integrator."""

    def test_equilibrium_is_constant(self):
        """Test that the path started at (1/theta2, theta1) never moves."""
        config = LvConfig(theta=ParameterVector.of((1.5, 0.8), "lv"), x0=(1.0 / 0.8, 1.5), n_points=100)
        path = integrate_lv(config).observations
        np.testing.assert_allclose(path[:, 0], 1.0 / 0.8, atol=1e-10)
        np.testing.assert_allclose(path[:, 1], 1.5, atol=1e-10)

    def test_rk4_self_convergence(self):
        """Test that halving the step shrinks the path change by about 2^4."""
        base = default_lv_config(n_points=500)
        paths = [integrate_lv(base.with_step(h)).observations for h in (0.03, 0.015, 0.0075)]
        coarse = np.max(np.abs(paths[0] - paths[1]))
        fine = np.max(np.abs(paths[1] - paths[2]))
        assert coarse / fine >= 12.0

    def test_step_must_divide_spacing(self):
        """Test that an integration step not dividing the spacing is refused."""
        with pytest.raises(DomainError):
            default_lv_config(n_points=500).with_step(0.007)

    def test_with_points_adjusts_step(self):
        """Test that changing R_T keeps a dividing step."""
        config = default_lv_config(n_points=2000)
        assert config.n_points == 2000
        assert config.spacing / config.step == pytest.approx(round(config.spacing / config.step))

    def test_noise_matched_residuals(self):
        """Test that noise-matched observations carry N(0, 0.5^2) errors."""
        config = default_lv_config(n_points=2000)
        clean = integrate_lv(config).observations
        noisy = simulate_lv_observations(config, "noise_matched", seed=3).observations
        residual = noisy - clean
        assert residual.std(axis=0) == pytest.approx([0.5, 0.5], abs=0.05)

    def test_deterministic_mode_ignores_seed(self):
        """Test that deterministic simulation is seed free."""
        model = LotkaVolterraModel(default_lv_config(n_points=100), "deterministic")
        a = model.simulate((1.0, 1.0), None, seed=1)
        b = model.simulate((1.0, 1.0), None, seed=2)
        assert not model.is_stochastic
        np.testing.assert_array_equal(a.observations, b.observations)

    def test_length_mismatch_refused(self):
        """Test that the LV model refuses a foreign series length."""
        model = LotkaVolterraModel(default_lv_config(n_points=100))
        with pytest.raises(DomainError):
            model.simulate((1.0, 1.0), 50, seed=1)

    def test_unknown_mode(self):
        """Test that unknown LV simulation modes are refused."""
        with pytest.raises(DomainError):
            LotkaVolterraModel(mode="stochastic")
