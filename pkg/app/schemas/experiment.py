from typing import List

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.schemas.objective import ObjectiveKind, ObjectiveSpec
from app.schemas.solver import SolverConfig
from app.schemas.trace import ALGORITHM_ALIASES, Algorithm

# small ridge: at s close to 70 the 600 training rows become linearly separable
BENCHMARK_ETA = 1e-3


class ExperimentConfig(BaseModel):
    """Synthetic AR(1) selection experiment; defaults reproduce the logistic benchmark."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(default=600, ge=1)
    n_test: int = Field(default=600, ge=1)
    p: int = Field(default=200, ge=1)
    k_true: int = Field(default=50, ge=1)
    alpha: float = Field(default=0.3, gt=-1.0, lt=1.0)
    sigma2: float = Field(default=5.0, gt=0.0)  # AR(1) innovation variance
    beta_norm2: float = Field(default=5.0, gt=0.0)
    noise_sigma: float = Field(default=1.0, ge=0.0)  # least squares responses only
    runs: int = Field(default=20, ge=1)
    s_max: int = Field(default=70, ge=1)
    algorithms: List[Algorithm] = [Algorithm.OBLIVIOUS, Algorithm.FORWARD_STEPWISE, Algorithm.OMP, Algorithm.FOBA]
    objective: ObjectiveSpec = ObjectiveSpec(kind=ObjectiveKind.LOGISTIC_L2, eta=BENCHMARK_ETA)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    add_bias: bool = True
    seed: int = Field(default=0, ge=0)

    @field_validator("algorithms", mode="before")
    @classmethod
    def resolve_aliases(cls, value):
        return [ALGORITHM_ALIASES.get(item, item) if isinstance(item, str) else item for item in value]

    @model_validator(mode="after")
    def check_sizes(self):
        if self.k_true > self.p:
            raise ValueError(f"k_true must be <= p, got k_true={self.k_true}, p={self.p}")
        if self.s_max > self.p:
            raise ValueError(f"s_max must be <= p, got s_max={self.s_max}, p={self.p}")
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")
        if len(set(self.algorithms)) != len(self.algorithms):
            raise ValueError("algorithms must not repeat")
        return self
