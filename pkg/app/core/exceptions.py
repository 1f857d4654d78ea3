from typing import Optional


class SparseGreedyError(Exception):
    """Base error; `exit_code` is what the CLI returns for it."""

    exit_code: int = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class ValidationError(SparseGreedyError):
    exit_code = 2


class UndefinedRatioError(SparseGreedyError):
    """Submodularity ratio whose denominator f(L u S) - f(L) is ~0."""

    exit_code = 2


class GuardExceededError(SparseGreedyError):
    exit_code = 3


class ConvergenceError(SparseGreedyError):
    exit_code = 4

    def __init__(self, detail: str, grad_norm: Optional[float] = None):
        if grad_norm is not None:
            detail = f"{detail} (final gradient norm {grad_norm:.3e})"
        super().__init__(detail)
        self.grad_norm = grad_norm


class SeparationError(ConvergenceError):
    """Unregularized logistic fit diverging on perfectly separable data."""
