import math

import numpy as np
import pytest

from app.core.exceptions import ValidationError
from app.models.support import ParamVector, Support
from app.services.datagen import (
    CovarianceModel,
    appendix_a_instance,
    ar1_design,
    derive_seed,
    gaussian_design,
    linear_responses,
    logistic_responses,
    rademacher_sparse_beta,
)


def _lag1_correlation(X):
    a, b = X[:, :-1].ravel(), X[:, 1:].ravel()
    return float(np.corrcoef(a, b)[0, 1])


class TestAr1Design:

    def test_independent_when_alpha_is_zero(self):
        X = ar1_design(600, 200, 0.0, 5.0, seed=1)
        assert abs(_lag1_correlation(X)) < 0.05
        assert X.var() == pytest.approx(5.0, rel=0.05)

    def test_lag_one_correlation(self):
        X = ar1_design(600, 200, 0.3, 5.0, seed=2)
        assert _lag1_correlation(X) == pytest.approx(0.3, abs=0.02)

    def test_stationary_marginal_variance(self):
        X = ar1_design(4000, 20, 0.6, 1.0, seed=3)
        np.testing.assert_allclose(X.var(axis=0), 1.0 / (1 - 0.36), rtol=0.1)

    def test_deterministic(self):
        np.testing.assert_array_equal(ar1_design(10, 5, 0.3, 5.0, 7), ar1_design(10, 5, 0.3, 5.0, 7))
        assert not np.array_equal(ar1_design(10, 5, 0.3, 5.0, 7), ar1_design(10, 5, 0.3, 5.0, 8))

    @pytest.mark.parametrize("alpha, sigma2", [(1.0, 1.0), (-1.2, 1.0), (0.3, 0.0)])
    def test_invalid_parameters(self, alpha, sigma2):
        with pytest.raises(ValidationError):
            ar1_design(5, 5, alpha, sigma2, 0)


class TestSparseBeta:

    def test_full_support_unit_entries(self):
        beta = rademacher_sparse_beta(6, 6, 6.0, seed=1)
        np.testing.assert_allclose(np.abs(beta.beta), 1.0)

    def test_benchmark_magnitude(self):
        beta = rademacher_sparse_beta(200, 50, 5.0, seed=2)
        assert np.count_nonzero(beta.beta) == 50
        np.testing.assert_allclose(np.abs(beta.restricted()), math.sqrt(0.1))
        assert float(beta.beta @ beta.beta) == pytest.approx(5.0)

    def test_invalid_k(self):
        with pytest.raises(ValidationError):
            rademacher_sparse_beta(5, 6, 1.0, seed=0)


class TestResponses:

    def test_zero_beta_is_a_fair_coin(self):
        X = np.random.default_rng(0).standard_normal((4000, 4))
        y = logistic_responses(X, ParamVector.zeros(4), seed=3)
        assert set(np.unique(y)) <= {0.0, 1.0}
        assert y.mean() == pytest.approx(0.5, abs=0.05)

    def test_saturated_sigmoid(self):
        X = np.ones((50, 1))
        beta = ParamVector.from_restricted([20.0], Support.of([0], 1))
        assert np.all(logistic_responses(X, beta, seed=4) == 1.0)

    def test_logistic_deterministic(self):
        X = np.random.default_rng(1).standard_normal((30, 3))
        beta = rademacher_sparse_beta(3, 2, 1.0, seed=0)
        np.testing.assert_array_equal(logistic_responses(X, beta, 5), logistic_responses(X, beta, 5))

    def test_noiseless_linear(self):
        X = np.random.default_rng(2).standard_normal((20, 3))
        beta = rademacher_sparse_beta(3, 2, 2.0, seed=0)
        np.testing.assert_array_equal(linear_responses(X, beta, 0.0, seed=1), X @ beta.beta)

    def test_pure_noise_variance(self):
        X = np.zeros((10000, 2))
        y = linear_responses(X, ParamVector.zeros(2), 1.5, seed=6)
        assert y.var() == pytest.approx(2.25, rel=0.1)

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError, match="dimension mismatch"):
            linear_responses(np.ones((3, 2)), ParamVector.zeros(3), 0.0, seed=0)


class TestGaussianDesign:

    def test_spike_zero_is_standard_normal(self):
        X = gaussian_design(20000, 3, CovarianceModel.SPIKED, seed=1, a=0.0)
        np.testing.assert_allclose(np.cov(X, rowvar=False), np.eye(3), atol=0.05)

    def test_identity_plus_ones(self):
        X = gaussian_design(20000, 3, CovarianceModel.IDENTITY_PLUS_ONES, seed=2)
        np.testing.assert_allclose(np.cov(X, rowvar=False), np.eye(3) + np.ones((3, 3)), atol=0.1)

    def test_spiked_covariance(self):
        X = gaussian_design(20000, 4, CovarianceModel.SPIKED, seed=3, a=0.5)
        np.testing.assert_allclose(np.cov(X, rowvar=False), 0.5 * np.eye(4) + 0.5, atol=0.05)

    def test_deterministic(self):
        first = gaussian_design(5, 3, CovarianceModel.SPIKED, seed=4, a=0.2)
        np.testing.assert_array_equal(first, gaussian_design(5, 3, CovarianceModel.SPIKED, seed=4, a=0.2))

    def test_invalid_spike(self):
        with pytest.raises(ValidationError):
            gaussian_design(5, 3, CovarianceModel.SPIKED, seed=0, a=1.0)


class TestAppendixInstance:

    @pytest.mark.parametrize("z", [0.05, 0.1, 0.2, 0.45])
    def test_unit_norms_and_inner_products(self, z):
        data = appendix_a_instance(z)
        np.testing.assert_allclose(np.linalg.norm(data.X, axis=0), 1.0, atol=1e-14)
        assert np.linalg.norm(data.y) == 1.0
        x1, x2, x3 = data.X.T
        assert abs(x2 @ x3 - 2 * z ** 2) <= 1e-14
        assert abs(x1 @ x2 - math.sqrt(1 - z ** 2)) <= 1e-14
        assert x1 @ x3 == 0.0

    @pytest.mark.parametrize("z", [0.0, 0.5, -0.1])
    def test_out_of_range(self, z):
        with pytest.raises(ValidationError):
            appendix_a_instance(z)


def test_derived_seeds_differ_per_stream():
    seeds = {derive_seed(0, run) for run in range(20)}
    assert len(seeds) == 20
    assert derive_seed(3, 1) == derive_seed(3, 1)
