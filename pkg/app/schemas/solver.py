from pydantic import BaseModel, ConfigDict, Field

from app.core.config import settings


class SolverConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    grad_tol: float = Field(default=settings.SOLVER_GRAD_TOL, gt=0.0)
    max_iters: int = Field(default=settings.SOLVER_MAX_ITERS, ge=1)
    ridge_fallback: float = Field(default=settings.SOLVER_RIDGE_FALLBACK, ge=0.0)
