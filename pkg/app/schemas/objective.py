import enum

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ObjectiveKind(str, enum.Enum):
    LEAST_SQUARES = "least_squares"
    LOGISTIC = "logistic"
    LOGISTIC_L2 = "logistic_l2"


# Short names accepted on the command line
OBJECTIVE_ALIASES = {
    "ls": ObjectiveKind.LEAST_SQUARES,
    "logistic": ObjectiveKind.LOGISTIC,
    "logistic-l2": ObjectiveKind.LOGISTIC_L2,
}


class ObjectiveSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: ObjectiveKind
    eta: float = Field(default=0.0, ge=0.0)  # l2 weight, logistic_l2 only
    normalize_by_n: bool = True

    @model_validator(mode="after")
    def check_hyperparameters(self):
        if self.kind != ObjectiveKind.LOGISTIC_L2 and self.eta != 0.0:
            raise ValueError(f"eta must be 0 for {self.kind.value}, got {self.eta}")
        if not self.normalize_by_n:
            raise ValueError("objectives are always averaged over n")
        return self

    @property
    def is_logistic(self) -> bool:
        return self.kind in (ObjectiveKind.LOGISTIC, ObjectiveKind.LOGISTIC_L2)

    @property
    def is_quadratic(self) -> bool:
        return self.kind == ObjectiveKind.LEAST_SQUARES
