"""
Unit Tests for the summary statistics

Tests for autocovariances, moments, the AR(2) OLS criterion and statistic sets.
"""

import numpy as np
import pytest

from series_models import TimeSeries, simulate_ma2
from summaries import (
    StatisticDescriptor,
    StatisticSet,
    autocov,
    evaluate_statistic_set,
    lv_olstats,
    named_statistic_set,
    ols_ar2_criterion,
    ols_ar2_criterion_gradient,
    ols_ar2_estimate,
    resolve_statistic_set,
    sample_mean,
    sample_third_moment,
)
from utils.exceptions import DegenerateDesignError, DomainError


@pytest.mark.unit
class TestMoments:
    """Test suite for moment statistics."""

    def test_autocov_divides_by_t(self):
        """Test the non-centred autocovariance with divisor T."""
        y = np.array([1.0, 2.0, 3.0, 4.0])
        assert autocov(y, 0) == pytest.approx(30.0 / 4.0)
        assert autocov(y, 1) == pytest.approx((2 + 6 + 12) / 4.0)
        assert autocov(y, 3) == pytest.approx(4.0 / 4.0)

    def test_autocov_lag_out_of_range(self):
        """Test that lag >= T is refused."""
        with pytest.raises(DomainError):
            autocov(np.ones(3), 3)
        with pytest.raises(DomainError):
            autocov(np.ones(3), -1)

    def test_mean_and_third(self):
        """Test the sample mean and raw third moment."""
        y = TimeSeries(np.array([-1.0, 0.0, 2.0]))
        assert sample_mean(y) == pytest.approx(1.0 / 3.0)
        assert sample_third_moment(y) == pytest.approx(7.0 / 3.0)

    def test_bivariate_refused_by_scalar_stat(self):
        """Test that scalar statistics refuse bivariate series."""
        with pytest.raises(DomainError):
            autocov(np.zeros((4, 2)), 0)

    def test_lv_olstats_divisor(self):
        """Test that LV variances use divisor R_T."""
        x = np.array([[1.0, 0.0], [3.0, 2.0]])
        result = lv_olstats(x)
        np.testing.assert_allclose(result.values, [2.0, 1.0, 1.0, 1.0])
        assert result.labels == ("lv_mean1", "lv_mean2", "lv_var1", "lv_var2")


@pytest.mark.unit
class TestOlsCriterion:
    """Test suite for the AR(2) least-squares criterion."""

    def test_estimate_is_minimiser(self):
        """Test that the normal-equations solution has zero gradient and minimal criterion."""
        y = simulate_ma2((0.6, 0.2), 2000, seed=4)
        estimate = ols_ar2_estimate(y)
        np.testing.assert_allclose(ols_ar2_criterion_gradient(y, estimate.beta), 0.0, atol=1e-10)
        for shift in ([0.01, 0.0], [0.0, -0.01]):
            assert ols_ar2_criterion(y, estimate.beta + shift) > estimate.criterion_value_at_min

    def test_gradient_matches_finite_differences(self):
        """Test the analytic gradient against central differences."""
        y = simulate_ma2((0.5, 0.5), 1000, seed=2)
        beta = np.array([0.3, -0.1])
        h = 1e-6
        numeric = np.array([
            (ols_ar2_criterion(y, beta + h * e) - ols_ar2_criterion(y, beta - h * e)) / (2 * h)
            for e in np.eye(2)
        ])
        np.testing.assert_allclose(ols_ar2_criterion_gradient(y, beta), numeric, atol=1e-6)

    def test_short_series(self):
        """Test that T < 5 is refused."""
        with pytest.raises(DomainError):
            ols_ar2_estimate(np.ones(4))

    def test_singular_design(self):
        """Test that a constant-zero series has a singular design."""
        with pytest.raises(DegenerateDesignError):
            ols_ar2_estimate(np.zeros(10))


@pytest.mark.unit
class TestStatisticSets:
    """Test suite for descriptors and statistic sets."""

    def test_named_dimensions(self):
        """Test the dimensions of the named sets."""
        assert named_statistic_set("eta1").dimension == 2
        assert named_statistic_set("eta5").dimension == 6
        assert named_statistic_set("ols_ar2").dimension == 2
        assert named_statistic_set("lv_olstats").dimension == 4

    def test_token_parsing(self):
        """Test CLI tokens map to descriptors."""
        assert StatisticDescriptor.from_token("acov3") == StatisticDescriptor("autocov", 3)
        assert StatisticDescriptor.from_token("third") == StatisticDescriptor("third_moment")
        assert named_statistic_set("acov0,acov1").tokens == ["acov0", "acov1"]

    def test_unknown_token(self):
        """Test that unknown tokens are refused."""
        with pytest.raises(DomainError):
            named_statistic_set("skewness")

    def test_duplicates_refused(self):
        """Test that a set cannot repeat a descriptor."""
        with pytest.raises(DomainError):
            StatisticSet.from_names(["acov0", "acov0"])

    def test_mixed_refused(self):
        """Test that scalar and LV statistics cannot be mixed."""
        with pytest.raises(DomainError):
            StatisticSet.from_names(["acov0", "lv_mean1"])

    def test_nesting(self):
        """Test prefix relations among the augmentation sets."""
        eta1, eta2, eta5 = (named_statistic_set(n) for n in ("eta1", "eta2", "eta5"))
        assert eta1.is_prefix_of(eta2)
        assert eta2.is_prefix_of(eta5)
        assert not eta2.is_prefix_of(eta1)
        assert not named_statistic_set("eta6").is_prefix_of(eta2)

    def test_columns_in(self):
        """Test that a subset finds its columns in a larger set."""
        eta6 = named_statistic_set("eta6")
        eta8 = named_statistic_set("eta8")
        np.testing.assert_array_equal(named_statistic_set("eta1").columns_in(eta8), [0, 1])
        np.testing.assert_array_equal(eta6.columns_in(eta8), [0, 1, 2])

    def test_evaluate_concatenates(self):
        """Test that evaluation follows descriptor order."""
        y = TimeSeries(np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0]))
        summary = evaluate_statistic_set(resolve_statistic_set(["mean", "acov1"]), y)
        assert summary.values[0] == pytest.approx(3.5)
        assert summary.values[1] == pytest.approx(autocov(y, 1))
        assert summary.series_length == 6

    def test_evaluate_too_short(self):
        """Test that a series shorter than the largest lag is refused."""
        with pytest.raises(DomainError):
            evaluate_statistic_set(named_statistic_set("eta3"), np.ones(3))
