"""Seeded synthetic designs and responses.

All randomness comes from a Philox counter-based generator keyed by
(seed, stream ids...), so every generator is a pure function of its
arguments and independent streams never overlap.
"""
import enum
import math

import numpy as np
from scipy.special import expit

from app.core.exceptions import ValidationError
from app.models.dataset import Dataset, LabelEncoding, validate_dataset
from app.models.support import ParamVector, Support

STREAM_DESIGN = 1
STREAM_BETA = 2
STREAM_RESPONSE = 3


class CovarianceModel(str, enum.Enum):
    IDENTITY_PLUS_ONES = "identity_plus_ones"  # I + 11^T
    SPIKED = "spiked"  # (1 - a) I + a 11^T


def rng_stream(seed: int, *stream: int) -> np.random.Generator:
    if seed < 0:
        raise ValidationError(f"seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, stream)])))


def derive_seed(seed: int, *stream: int) -> int:
    """Child seed for a sub-run, e.g. derive_seed(master, run_index)."""
    state = np.random.SeedSequence([int(seed), *map(int, stream)]).generate_state(1, dtype=np.uint32)
    return int(state[0])


def ar1_design(n: int, p: int, alpha: float, sigma2: float, seed: int) -> np.ndarray:
    """Rows are independent stationary AR(1) sequences.

    x_1 ~ N(0, sigma2/(1 - alpha^2)), x_{j+1} = alpha x_j + N(0, sigma2);
    sigma2 is the innovation variance.
    """
    if n < 1 or p < 1:
        raise ValidationError(f"n and p must be >= 1, got n={n}, p={p}")
    if not abs(alpha) < 1:
        raise ValidationError(f"alpha must satisfy |alpha| < 1, got {alpha}")
    if not sigma2 > 0:
        raise ValidationError(f"sigma2 must be > 0, got {sigma2}")
    rng = rng_stream(seed, STREAM_DESIGN)
    innovations = rng.standard_normal((n, p)) * math.sqrt(sigma2)
    X = np.empty((n, p))
    X[:, 0] = innovations[:, 0] / math.sqrt(1.0 - alpha ** 2)
    for j in range(1, p):
        X[:, j] = alpha * X[:, j - 1] + innovations[:, j]
    return X


def population_covariance(model: CovarianceModel, p: int, a: float = 0.0) -> np.ndarray:
    model = CovarianceModel(model)
    if model == CovarianceModel.IDENTITY_PLUS_ONES:
        return np.eye(p) + np.ones((p, p))
    if not 0.0 <= a < 1.0:
        raise ValidationError(f"spike a must be in [0, 1), got {a}")
    return (1.0 - a) * np.eye(p) + a * np.ones((p, p))


def gaussian_design(n: int, p: int, model: CovarianceModel, seed: int, a: float = 0.0) -> np.ndarray:
    """Rows i.i.d. N(0, Sigma) for Sigma = c I + d 11^T.

    Sigma^{1/2} = sqrt(c) I + e 11^T with e = (sqrt(c + d p) - sqrt(c)) / p.
    """
    model = CovarianceModel(model)
    if n < 1 or p < 1:
        raise ValidationError(f"n and p must be >= 1, got n={n}, p={p}")
    if model == CovarianceModel.IDENTITY_PLUS_ONES:
        c, d = 1.0, 1.0
    else:
        if not 0.0 <= a < 1.0:
            raise ValidationError(f"spike a must be in [0, 1), got {a}")
        c, d = 1.0 - a, a
    e = (math.sqrt(c + d * p) - math.sqrt(c)) / p
    Z = rng_stream(seed, STREAM_DESIGN).standard_normal((n, p))
    return math.sqrt(c) * Z + e * Z.sum(axis=1, keepdims=True)


def rademacher_sparse_beta(p: int, k: int, norm2: float, seed: int) -> ParamVector:
    """k random coordinates set to +-1, scaled so that ||beta||_2^2 = norm2."""
    if not 1 <= k <= p:
        raise ValidationError(f"k must be in [1, {p}], got {k}")
    if not norm2 > 0:
        raise ValidationError(f"norm2 must be > 0, got {norm2}")
    rng = rng_stream(seed, STREAM_BETA)
    indices = np.sort(rng.choice(p, size=k, replace=False))
    signs = rng.choice(np.array([-1.0, 1.0]), size=k)
    return ParamVector.from_restricted(signs * math.sqrt(norm2 / k), Support.of(indices, p))


def _linear_predictor(X: np.ndarray, beta: ParamVector) -> np.ndarray:
    if X.shape[1] != beta.p:
        raise ValidationError(f"dimension mismatch: X has {X.shape[1]} columns, beta has length {beta.p}")
    return X @ beta.beta


def logistic_responses(X: np.ndarray, beta: ParamVector, seed: int) -> np.ndarray:
    """y_i ~ Bernoulli(sigmoid(<x_i, beta>)), encoded 0/1."""
    probabilities = expit(_linear_predictor(X, beta))
    uniforms = rng_stream(seed, STREAM_RESPONSE).random(X.shape[0])
    return (uniforms < probabilities).astype(np.float64)


def linear_responses(X: np.ndarray, beta: ParamVector, sigma_noise: float, seed: int) -> np.ndarray:
    """y = X beta + w, w_i ~ N(0, sigma_noise^2) i.i.d."""
    if sigma_noise < 0:
        raise ValidationError(f"sigma_noise must be >= 0, got {sigma_noise}")
    mean = _linear_predictor(X, beta)
    if sigma_noise == 0:
        return mean
    return mean + sigma_noise * rng_stream(seed, STREAM_RESPONSE).standard_normal(X.shape[0])


def appendix_a_instance(z: float) -> Dataset:
    """Three unit-norm features on which forward stepwise is arbitrarily bad.

    y = (1,0,0), x1 = (0,1,0), x2 = (z, sqrt(1-z^2), 0), x3 = (2z, 0, sqrt(1-4z^2)).
    Greedy picks x3 then x2 (R^2 = (5z^2 - 8z^4)/(1 - 4z^4)); {x1, x2} fits y exactly.
    """
    if not 0.0 < z < 0.5:
        raise ValidationError(f"z must be in (0, 0.5), got {z}")
    y = np.array([1.0, 0.0, 0.0])
    X = np.array([
        [0.0, z, 2.0 * z],
        [1.0, math.sqrt(1.0 - z ** 2), 0.0],
        [0.0, 0.0, math.sqrt(1.0 - 4.0 * z ** 2)],
    ])
    return validate_dataset(X, y, LabelEncoding.REAL)
