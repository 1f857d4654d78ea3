import enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, model_validator

from app.core.config import settings
from app.schemas.objective import ObjectiveSpec


class ConcavityMethod(str, enum.Enum):
    EXACT_QUADRATIC = "exact_quadratic"
    HESSIAN_SAMPLED = "hessian_sampled"


class ConcavityParams(BaseModel):
    """Restricted curvature of the objective: m_k, M_k on Omega_k and M~_k on the
    1-sparse-difference domain. Only `exact_quadratic` values are certified."""

    k: int = Field(ge=1)
    m_k: float
    M_k: float
    M_tilde_k: float
    method: ConcavityMethod

    @model_validator(mode="after")
    def check_ordering(self):
        tol = 1e-12 * max(1.0, abs(self.M_k))
        if self.m_k < -tol or self.m_k > self.M_k + tol:
            raise ValueError(f"need 0 <= m_k <= M_k, got m_k={self.m_k}, M_k={self.M_k}")
        if self.M_tilde_k > self.M_k + tol:
            raise ValueError(f"need M_tilde_k <= M_k, got {self.M_tilde_k} > {self.M_k}")
        return self

    @property
    def certified(self) -> bool:
        return self.method == ConcavityMethod.EXACT_QUADRATIC


class GammaValue(BaseModel):
    U: List[int]
    k: int
    value: Optional[float] = None  # None when every pair was undefined (+inf)
    pairs: int = 0
    skipped_pairs: int = 0


class BoundCheck(BaseModel):
    theorem: str
    lhs: float
    rhs: float
    slack: float = settings.CHECK_SLACK
    passed: bool
    certified: bool = True
    note: Optional[str] = None

    @model_validator(mode="after")
    def check_flag(self):
        if self.passed != (self.lhs >= self.rhs - self.slack):
            raise ValueError(f"{self.theorem}: pass flag disagrees with lhs >= rhs - slack")
        return self

    @classmethod
    def evaluate(cls, theorem: str, lhs: float, rhs: float, certified: bool = True,
                 note: Optional[str] = None, slack: float = None) -> "BoundCheck":
        slack = settings.CHECK_SLACK if slack is None else slack
        return cls(theorem=theorem, lhs=lhs, rhs=rhs, slack=slack,
                   passed=bool(lhs >= rhs - slack), certified=certified, note=note)


class IsometryCheck(BaseModel):
    """Whether M_s <= 2 m_{s+r}, the restricted isometry requirement older OMP analyses need."""

    s: int = Field(ge=1)
    r: int = Field(ge=1)
    M_s: float
    m_sr: float
    holds: bool
    spike_threshold: Optional[float] = None  # spiked population only: holds iff a <= 1/(s+1)


class AnalysisReport(BaseModel):
    schema_version: int = settings.SCHEMA_VERSION
    objective: ObjectiveSpec
    k: Optional[int] = None
    opt_support: Optional[List[int]] = None
    f_opt: Optional[float] = None
    gamma_values: List[GammaValue] = []
    params: List[ConcavityParams] = []
    bound_checks: List[BoundCheck] = []
    isometry: Optional[IsometryCheck] = None
    provenance: Dict[str, Any] = {}

    @property
    def violations(self) -> List[BoundCheck]:
        return [check for check in self.bound_checks if check.certified and not check.passed]

    def checks_for(self, theorem: str) -> List[BoundCheck]:
        return [check for check in self.bound_checks if check.theorem == theorem]

    def merged(self, other: "AnalysisReport") -> "AnalysisReport":
        known = {p.k for p in self.params}
        return self.model_copy(update={
            "gamma_values": self.gamma_values + other.gamma_values,
            "params": self.params + [p for p in other.params if p.k not in known],
            "bound_checks": self.bound_checks + other.bound_checks,
        })


class OracleResult(BaseModel):
    """Best k-subset found by exhaustive enumeration."""

    schema_version: int = settings.SCHEMA_VERSION
    objective: ObjectiveSpec
    k: int = Field(ge=0)
    support: List[int]
    f_value: float
    r_squared: Optional[float] = None  # least squares only
    provenance: Dict[str, Any] = {}
