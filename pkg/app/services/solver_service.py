import logging
import threading
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.optimize import linprog
from scipy.special import expit

from app.core.config import settings
from app.core.exceptions import ConvergenceError, SeparationError
from app.models.dataset import Dataset
from app.models.support import ParamVector, Support
from app.schemas.objective import ObjectiveKind, ObjectiveSpec
from app.schemas.solver import SolverConfig
from app.services.objective_service import ObjectiveService

logger = logging.getLogger(__name__)

_MAX_HALVINGS = 60
_SINGULAR_PIVOT = 1e-12


@dataclass(frozen=True)
class RestrictedFit:
    beta: ParamVector
    value: float  # l(beta)
    f_value: float  # l(beta) - l(beta on the fixed columns only)
    iterations: int = 0


def _factor(matrix: np.ndarray):
    """Cholesky factor of a symmetric matrix, or None when it is (numerically) singular."""
    try:
        factor = cho_factor(matrix, lower=False, check_finite=False)
    except (LinAlgError, ValueError):
        return None
    pivots = np.abs(np.diag(factor[0]))
    scale = float(np.max(np.abs(np.diag(matrix))))
    if scale == 0.0 or not np.all(np.isfinite(pivots)) or pivots.min() ** 2 <= _SINGULAR_PIVOT * scale:
        return None
    return factor


def is_separable(X: np.ndarray, y: np.ndarray) -> bool:
    """True when some direction w has (2y_i - 1) <x_i, w> >= 0 on every row and > 0 on one.

    Then the logistic log-likelihood keeps increasing along w and has no finite
    maximizer (complete or quasi-complete separation). Solved as a bounded LP.
    """
    signed = X * (2.0 * y - 1.0)[:, None]
    result = linprog(
        -signed.sum(axis=0),
        A_ub=-signed,
        b_ub=np.zeros(signed.shape[0]),
        bounds=[(-1.0, 1.0)] * signed.shape[1],
        method="highs",
    )
    if result.status != 0:
        return False
    margins = signed @ result.x
    slack = settings.SEPARATION_SLACK * max(1.0, float(np.max(np.abs(signed))))
    return bool(margins.min() >= -slack and margins.sum() > slack * signed.shape[0])


class RestrictedSolver:
    """Maximizes l(beta) over beta supported inside a given set.

    Defines the normalized set function f(S) = max_{supp(beta) in S} l(beta) - l(0).
    Columns listed in `data.fixed` are part of every fit, and f is normalized
    against the fit on those columns alone.
    """

    def __init__(self, spec: ObjectiveSpec, data: Dataset, config: Optional[SolverConfig] = None):
        self.spec = spec
        self.data = data
        self.config = config or SolverConfig()
        self.objective = ObjectiveService(spec, data)
        self._base: Optional[RestrictedFit] = None

    @property
    def p(self) -> int:
        return self.data.p

    @property
    def base(self) -> RestrictedFit:
        if self._base is None:
            beta, value = self._solve(Support.of(self.data.fixed, self.p), None)
            self._base = RestrictedFit(beta=beta, value=value, f_value=0.0)
        return self._base

    def fit(self, support: Support, warm_start: Optional[ParamVector] = None) -> RestrictedFit:
        full = support.union(Support.of(self.data.fixed, self.p))
        if len(full) == len(self.data.fixed):
            return self.base
        beta, value = self._solve(full, warm_start)
        return RestrictedFit(beta=beta, value=value, f_value=value - self.base.value)

    def maximize_restricted(self, support: Support,
                            warm_start: Optional[ParamVector] = None) -> Tuple[ParamVector, float]:
        fit = self.fit(support, warm_start)
        return fit.beta, fit.value

    def set_function_value(self, support: Support) -> float:
        """f(S); exactly 0 for S with no selectable columns."""
        return self.fit(support).f_value

    def _solve(self, support: Support, warm_start: Optional[ParamVector]) -> Tuple[ParamVector, float]:
        if len(support) == 0:
            beta = ParamVector.zeros(self.p)
            return beta, self.objective.value(beta.beta)
        restricted = self.objective.restricted(support.indices)
        if self.spec.kind == ObjectiveKind.LEAST_SQUARES:
            coefficients = self._solve_least_squares(restricted)
        else:
            start = np.zeros(len(support))
            if warm_start is not None:
                start = warm_start.beta[support.as_array()].copy()
            coefficients = self._newton(restricted, start)
        value = restricted.value(coefficients)
        return ParamVector.from_restricted(coefficients, support), value

    def _solve_least_squares(self, restricted: ObjectiveService) -> np.ndarray:
        X, y, n = restricted.X, restricted.y, restricted.n
        gram = X.T @ X / n
        rhs = X.T @ y / n
        factor = _factor(gram)
        if factor is None:
            logger.debug(f"singular restricted Gram of size {gram.shape[0]}, adding ridge {self.config.ridge_fallback}")
            gram = gram + self.config.ridge_fallback * np.eye(gram.shape[0])
            factor = _factor(gram)
        if factor is None:
            coefficients = np.linalg.lstsq(X, y, rcond=None)[0]
        else:
            coefficients = cho_solve(factor, rhs, check_finite=False)
            # one step of iterative refinement on the normal equations
            correction = cho_solve(factor, rhs - gram @ coefficients, check_finite=False)
            coefficients = coefficients + correction
        return coefficients

    def _newton(self, restricted: ObjectiveService, beta: np.ndarray) -> np.ndarray:
        """Damped Newton ascent with Armijo halving; gradient steps when the Hessian is singular."""
        config = self.config
        value = restricted.value(beta)
        grad = restricted.gradient(beta)
        for iteration in range(config.max_iters):
            grad_norm = float(np.max(np.abs(grad)))
            if grad_norm <= config.grad_tol:
                self._check_separation(restricted, beta, grad_norm, converged=True)
                return beta
            factor = _factor(-restricted.hessian(beta))
            direction = cho_solve(factor, grad, check_finite=False) if factor is not None else grad
            slope = float(grad @ direction)
            if factor is None or not np.isfinite(slope) or slope <= 0.0:
                direction, slope = grad, float(grad @ grad)

            # rounding floor: value differences below a few ulps are noise
            floor = 8.0 * np.finfo(np.float64).eps * max(1.0, abs(value))
            step = 1.0
            for _ in range(_MAX_HALVINGS):
                candidate = beta + step * direction
                candidate_value = restricted.value(candidate)
                if np.isfinite(candidate_value) and \
                        candidate_value >= value + settings.ARMIJO_C * step * slope - floor:
                    break
                step *= 0.5
            else:
                self._check_separation(restricted, beta, grad_norm, converged=False)
                raise ConvergenceError(
                    f"line search failed after {iteration} Newton iterations", grad_norm=grad_norm
                )

            beta, value = candidate, candidate_value
            grad = restricted.gradient(beta)
            if self.spec.kind == ObjectiveKind.LOGISTIC and np.linalg.norm(beta) > settings.DIVERGENCE_NORM:
                raise SeparationError(
                    f"coefficients diverged past norm {settings.DIVERGENCE_NORM:g}: data looks perfectly separable",
                    grad_norm=float(np.max(np.abs(grad))),
                )

        grad_norm = float(np.max(np.abs(grad)))
        if grad_norm <= config.grad_tol:
            self._check_separation(restricted, beta, grad_norm, converged=True)
            return beta
        self._check_separation(restricted, beta, grad_norm, converged=False)
        raise ConvergenceError(f"no convergence after {config.max_iters} iterations", grad_norm=grad_norm)

    def _check_separation(self, restricted: ObjectiveService, beta: np.ndarray, grad_norm: float,
                          converged: bool) -> None:
        """Raise SeparationError when an unregularized logistic fit has no finite maximizer.

        The LP test only runs once the fit shows the symptom: curvature weights
        collapsing at a "converged" point, or Newton failing outright.
        """
        if self.spec.kind != ObjectiveKind.LOGISTIC:
            return
        if converged:
            probabilities = expit(restricted.X @ beta)
            if float(np.min(probabilities * (1.0 - probabilities))) > settings.SEPARATION_WEIGHT_FLOOR:
                return
        if is_separable(restricted.X, restricted.y):
            raise SeparationError(
                f"logistic data is perfectly separable on {restricted.X.shape[1]} columns "
                f"(||beta|| = {np.linalg.norm(beta):.3g}): no finite maximizer",
                grad_norm=grad_norm,
            )


class SetFunctionOracle:
    """Memoized f(S) over a solver; safe to call from worker threads."""

    def __init__(self, solver: RestrictedSolver):
        self.solver = solver
        self._cache: Dict[Tuple[int, ...], float] = {}
        self._lock = threading.Lock()

    @property
    def p(self) -> int:
        return self.solver.p

    def __call__(self, support: Support) -> float:
        key = support.indices
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None:
            return cached
        value = self.solver.set_function_value(support)
        with self._lock:
            self._cache[key] = value
        return value

    def __len__(self) -> int:
        return len(self._cache)
