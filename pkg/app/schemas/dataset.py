from typing import Any, Dict, List

from pydantic import BaseModel, model_validator

from app.core.config import settings
from app.models.support import ParamVector, Support


class GroundTruth(BaseModel):
    """The generating coefficient vector of a simulated dataset."""

    schema_version: int = settings.SCHEMA_VERSION
    support: List[int]
    beta: List[float]
    provenance: Dict[str, Any] = {}

    @model_validator(mode="after")
    def check_support(self):
        self.to_param()
        return self

    def to_param(self) -> ParamVector:
        return ParamVector.from_dense(self.beta, Support.of(self.support, len(self.beta)))

    @classmethod
    def from_param(cls, beta: ParamVector, **provenance) -> "GroundTruth":
        return cls(support=beta.support.to_list(), beta=beta.beta.tolist(), provenance=provenance)
