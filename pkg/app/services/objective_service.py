from typing import Sequence

import numpy as np
from scipy.special import expit

from app.core.config import settings
from app.core.exceptions import GuardExceededError, ValidationError
from app.models.dataset import Dataset, LabelEncoding
from app.models.support import ParamVector
from app.schemas.objective import ObjectiveKind, ObjectiveSpec

_EPS = np.finfo(np.float64).eps


class ObjectiveService:
    """Concave objective l(beta) over a design, averaged over the n rows.

    least_squares: -(1/(2n))||X beta - y||^2
    logistic:      (1/n) sum_i [y_i <x_i, beta> - log(1 + exp <x_i, beta>)]
    logistic_l2:   logistic - (eta/2)||beta||^2
    """

    def __init__(self, spec: ObjectiveSpec, data: Dataset):
        if spec.is_logistic and data.label_encoding != LabelEncoding.BINARY01:
            raise ValidationError(f"{spec.kind.value} objective requires binary01 labels")
        self.spec = spec
        self.X = data.X
        self.y = data.y
        self.n = data.n

    @classmethod
    def _from_arrays(cls, spec: ObjectiveSpec, X: np.ndarray, y: np.ndarray) -> "ObjectiveService":
        service = cls.__new__(cls)
        service.spec = spec
        service.X = X
        service.y = y
        service.n = X.shape[0]
        return service

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def restricted(self, columns: Sequence[int]) -> "ObjectiveService":
        """The same objective as a function of the coefficients on `columns` only."""
        return self._from_arrays(self.spec, self.X[:, np.asarray(columns, dtype=np.intp)], self.y)

    def _coerce(self, beta) -> np.ndarray:
        if isinstance(beta, ParamVector):
            beta = beta.beta
        beta = np.asarray(beta, dtype=np.float64)
        if beta.shape != (self.p,):
            raise ValidationError(f"dimension mismatch: beta has shape {beta.shape}, expected ({self.p},)")
        return beta

    def value(self, beta) -> float:
        beta = self._coerce(beta)
        t = self.X @ beta
        if self.spec.kind == ObjectiveKind.LEAST_SQUARES:
            residual = t - self.y
            return float(-(residual @ residual) / (2.0 * self.n))
        # log(1 + e^t) via logaddexp stays finite for any finite t
        loglik = float(np.sum(self.y * t - np.logaddexp(0.0, t)) / self.n)
        if self.spec.kind == ObjectiveKind.LOGISTIC_L2:
            loglik -= 0.5 * self.spec.eta * float(beta @ beta)
        return loglik

    def gradient(self, beta) -> np.ndarray:
        beta = self._coerce(beta)
        t = self.X @ beta
        if self.spec.kind == ObjectiveKind.LEAST_SQUARES:
            return self.X.T @ (self.y - t) / self.n
        grad = self.X.T @ (self.y - expit(t)) / self.n
        if self.spec.kind == ObjectiveKind.LOGISTIC_L2:
            grad -= self.spec.eta * beta
        return grad

    def curvature_weights(self, beta) -> np.ndarray:
        """Diagonal D of the Hessian -(1/n) X^T D X (all ones for least squares)."""
        beta = self._coerce(beta)
        if self.spec.kind == ObjectiveKind.LEAST_SQUARES:
            return np.ones(self.n)
        s = np.clip(expit(self.X @ beta), _EPS, 1.0 - _EPS)
        return s * (1.0 - s)

    def hessian(self, beta) -> np.ndarray:
        if self.p > settings.HESSIAN_DIM_LIMIT:
            raise GuardExceededError(
                f"dense Hessian of dimension {self.p} exceeds limit {settings.HESSIAN_DIM_LIMIT}"
            )
        weights = self.curvature_weights(beta)
        H = -(self.X.T * weights) @ self.X / self.n
        H = 0.5 * (H + H.T)
        if self.spec.kind == ObjectiveKind.LOGISTIC_L2:
            H[np.diag_indices_from(H)] -= self.spec.eta
        return H


def value(spec: ObjectiveSpec, data: Dataset, beta: ParamVector) -> float:
    return ObjectiveService(spec, data).value(beta)


def gradient(spec: ObjectiveSpec, data: Dataset, beta: ParamVector) -> np.ndarray:
    return ObjectiveService(spec, data).gradient(beta)


def hessian(spec: ObjectiveSpec, data: Dataset, beta: ParamVector) -> np.ndarray:
    return ObjectiveService(spec, data).hessian(beta)
