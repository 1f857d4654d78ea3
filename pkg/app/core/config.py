from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Restricted solver
    SOLVER_GRAD_TOL: float = 1e-8
    SOLVER_MAX_ITERS: int = 200
    SOLVER_RIDGE_FALLBACK: float = 1e-10
    DIVERGENCE_NORM: float = 1e6  # ||beta||_2 above this means perfect separation
    SEPARATION_WEIGHT_FLOOR: float = 1e-6  # min sigma(1 - sigma) that triggers the separation test
    SEPARATION_SLACK: float = 1e-7
    ARMIJO_C: float = 1e-4

    # Guards
    HESSIAN_DIM_LIMIT: int = 4096
    EXHAUSTIVE_P_LIMIT: int = 14
    EXHAUSTIVE_U_LIMIT: int = 10
    BRUTE_FORCE_LIMIT: int = 1_000_000

    # Analysis
    CHECK_SLACK: float = 1e-6
    RATIO_DENOMINATOR_EPS: float = 1e-12
    HESSIAN_SAMPLES: int = 32

    # Output
    SCHEMA_VERSION: int = 1

    # Runtime
    THREADS: Optional[int] = None  # None = all available cores
    LOG_LEVEL: str = "INFO"

    model_config = SettingsConfigDict(env_file=".env", env_prefix="SPARSEGREEDY_")


settings = Settings()
