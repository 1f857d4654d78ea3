import itertools
import logging
from typing import Iterable, List, Optional

import numpy as np
from scipy.linalg import eigh

from app.core.config import settings
from app.core.exceptions import GuardExceededError, ValidationError
from app.models.dataset import Dataset
from app.schemas.analysis import ConcavityMethod, ConcavityParams
from app.schemas.objective import ObjectiveSpec
from app.services.datagen import population_covariance, rng_stream
from app.services.objective_service import ObjectiveService

logger = logging.getLogger(__name__)

# stream id for the sampled-Hessian heuristic
STREAM_HESSIAN_SAMPLES = 101


def gram_concavity_params(gram: np.ndarray, k: int) -> ConcavityParams:
    """Exact sparse eigenvalues of a PSD curvature matrix.

    m_k / M_k are the extreme eigenvalues over all k x k principal submatrices
    (interlacing makes "size exactly k" equal to "size at most k"); M~_k is
    the largest curvature along a single coordinate, i.e. the largest diagonal.
    """
    gram = np.asarray(gram, dtype=np.float64)
    p = gram.shape[0]
    if p > settings.EXHAUSTIVE_P_LIMIT:
        raise GuardExceededError(
            f"exact sparse eigenvalues need p <= {settings.EXHAUSTIVE_P_LIMIT}, got p={p}"
        )
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    size = min(k, p)
    m_k, M_k = np.inf, -np.inf
    for columns in itertools.combinations(range(p), size):
        block = gram[np.ix_(columns, columns)]
        eigenvalues = eigh(block, eigvals_only=True)
        m_k = min(m_k, float(eigenvalues[0]))
        M_k = max(M_k, float(eigenvalues[-1]))
    M_tilde = float(np.max(np.diag(gram)))
    # PSD by construction; clip rounding noise below zero
    return ConcavityParams(k=k, m_k=max(m_k, 0.0), M_k=M_k, M_tilde_k=min(M_tilde, M_k),
                           method=ConcavityMethod.EXACT_QUADRATIC)


def sampled_concavity_params(spec: ObjectiveSpec, data: Dataset, k: int,
                             samples: Optional[int] = None, seed: int = 0) -> ConcavityParams:
    """Heuristic: restricted Hessian eigenvalues at random k-sparse points.

    Not a certificate; the result is labeled `hessian_sampled`.
    """
    samples = samples or settings.HESSIAN_SAMPLES
    objective = ObjectiveService(spec, data)
    rng = rng_stream(seed, STREAM_HESSIAN_SAMPLES, k)
    size = min(k, data.p)
    m_k, M_k, M_tilde = np.inf, -np.inf, -np.inf
    for _ in range(samples):
        columns = np.sort(rng.choice(data.p, size=size, replace=False))
        restricted = objective.restricted(columns)
        point = rng.standard_normal(size) / np.sqrt(size)
        curvature = -restricted.hessian(point)
        eigenvalues = eigh(curvature, eigvals_only=True)
        m_k = min(m_k, float(eigenvalues[0]))
        M_k = max(M_k, float(eigenvalues[-1]))
        M_tilde = max(M_tilde, float(np.max(np.diag(curvature))))
    return ConcavityParams(k=k, m_k=max(m_k, 0.0), M_k=M_k, M_tilde_k=min(M_tilde, M_k),
                           method=ConcavityMethod.HESSIAN_SAMPLED)


def sparse_concavity_params(spec: ObjectiveSpec, data: Dataset, k: int,
                            samples: Optional[int] = None, seed: int = 0) -> ConcavityParams:
    """Exact sparse eigenvalues of (1/n) X^T X for least squares with p <= 14,
    otherwise the sampled-Hessian heuristic."""
    if spec.is_quadratic and data.p <= settings.EXHAUSTIVE_P_LIMIT:
        return gram_concavity_params(data.X.T @ data.X / data.n, k)
    logger.info(f"using sampled Hessian curvature for {spec.kind.value}, p={data.p}, k={k} (not certified)")
    return sampled_concavity_params(spec, data, k, samples=samples, seed=seed)


def concavity_profile(spec: ObjectiveSpec, data: Dataset, ks: Iterable[int],
                      samples: Optional[int] = None, seed: int = 0) -> List[ConcavityParams]:
    """Parameters for several sparsities, checked for monotonicity in k on the exact path."""
    profile = [sparse_concavity_params(spec, data, k, samples=samples, seed=seed) for k in sorted(set(ks))]
    exact = [params for params in profile if params.certified]
    for smaller, larger in zip(exact, exact[1:]):
        if smaller.m_k < larger.m_k - 1e-12 or smaller.M_k > larger.M_k + 1e-12:
            logger.warning(f"sparse eigenvalues not monotone between k={smaller.k} and k={larger.k}")
    return profile


def population_sparse_eigenvalues(model, p: int, s: int, a: float = 0.0) -> ConcavityParams:
    """Exact s-sparse eigenvalues of a population covariance (I + 11^T or the spiked model).

    Every s x s principal block of c I + d 11^T is the same matrix, so one
    block gives the exact values for any p.
    """
    if not 1 <= s <= p:
        raise ValidationError(f"s must be in [1, {p}], got {s}")
    block = population_covariance(model, s, a)
    eigenvalues = eigh(block, eigvals_only=True)
    return ConcavityParams(k=s, m_k=float(eigenvalues[0]), M_k=float(eigenvalues[-1]),
                           M_tilde_k=float(np.max(np.diag(block))), method=ConcavityMethod.EXACT_QUADRATIC)
