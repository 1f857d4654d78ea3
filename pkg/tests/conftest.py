import numpy as np
import pytest

from app.models.dataset import LabelEncoding, validate_dataset
from app.schemas.objective import ObjectiveKind, ObjectiveSpec
from app.services.datagen import appendix_a_instance

LS = ObjectiveSpec(kind=ObjectiveKind.LEAST_SQUARES)
LOGISTIC = ObjectiveSpec(kind=ObjectiveKind.LOGISTIC)
LOGISTIC_L2 = ObjectiveSpec(kind=ObjectiveKind.LOGISTIC_L2, eta=0.1)
ORTHONORMAL_COEFFICIENTS = np.array([3.0, -1.0, 0.5, 2.0])


@pytest.fixture
def appendix_data():
    return appendix_a_instance(0.1)


@pytest.fixture
def orthonormal_data():
    """Four columns with (1/n) X^T X = I, so f is modular: f(S) = sum_{j in S} b_j^2 / 2."""
    n = 8
    Q, _ = np.linalg.qr(np.random.default_rng(7).standard_normal((n, 5)))
    X = np.sqrt(n) * Q[:, :4]
    y = X @ ORTHONORMAL_COEFFICIENTS + 0.7 * np.sqrt(n) * Q[:, 4]
    return validate_dataset(X, y)


@pytest.fixture
def make_ls_instance():
    """Random Gaussian least-squares instance factory: make(rng, n, p)."""

    def make(rng, n=50, p=6):
        X = rng.standard_normal((n, p))
        beta = rng.standard_normal(p) * (rng.random(p) < 0.6)
        y = X @ beta + 0.5 * rng.standard_normal(n)
        return validate_dataset(X, y)

    return make


@pytest.fixture
def make_logistic_instance():
    """Random logistic instance factory with labels drawn from a sparse model."""

    def make(rng, n=100, p=6):
        X = rng.standard_normal((n, p))
        beta = np.zeros(p)
        beta[: min(3, p)] = [1.0, -0.8, 0.6][: min(3, p)]
        probabilities = 1.0 / (1.0 + np.exp(-(X @ beta)))
        y = (rng.random(n) < probabilities).astype(float)
        return validate_dataset(X, y, LabelEncoding.BINARY01)

    return make
