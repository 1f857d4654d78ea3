import enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, model_validator

from app.core.config import settings
from app.models.support import ParamVector, Support
from app.schemas.objective import ObjectiveSpec
from app.schemas.solver import SolverConfig

GAIN_CONSISTENCY_TOL = 1e-10


class Algorithm(str, enum.Enum):
    OBLIVIOUS = "oblivious"
    FORWARD_STEPWISE = "forward_stepwise"
    OMP = "omp"
    FOBA = "foba"

    @property
    def forward_only(self) -> bool:
        return self != Algorithm.FOBA


ALGORITHM_ALIASES = {
    "oblivious": Algorithm.OBLIVIOUS,
    "fs": Algorithm.FORWARD_STEPWISE,
    "omp": Algorithm.OMP,
    "foba": Algorithm.FOBA,
}


class StepAction(str, enum.Enum):
    ADD = "add"
    DROP = "drop"


class SelectionStep(BaseModel):
    iteration: int = Field(ge=1)
    action: StepAction = StepAction.ADD
    chosen_index: int = Field(ge=0)
    support: List[int]
    beta: List[float]
    f_value: float
    marginal_gain: float


class SelectionTrace(BaseModel):
    schema_version: int = settings.SCHEMA_VERSION
    algorithm: Algorithm
    objective: ObjectiveSpec
    solver: SolverConfig = Field(default_factory=SolverConfig)
    seed: int = Field(default=0, ge=0)
    p: int = Field(ge=1)
    fixed: List[int] = []
    steps: List[SelectionStep] = []
    scores: Optional[List[float]] = None  # singleton values f({j}), oblivious only
    provenance: Dict[str, Any] = {}

    @model_validator(mode="after")
    def check_steps(self):
        support = set(self.fixed)
        previous_f = 0.0
        for step in self.steps:
            current = set(step.support)
            if step.support != sorted(current) or len(current) != len(step.support):
                raise ValueError(f"step {step.iteration}: support must be strictly increasing")
            if step.action == StepAction.ADD:
                expected = support | {step.chosen_index}
                if step.chosen_index in support:
                    raise ValueError(f"step {step.iteration}: index {step.chosen_index} added twice")
            else:
                expected = support - {step.chosen_index}
                if step.chosen_index not in support or step.chosen_index in self.fixed:
                    raise ValueError(f"step {step.iteration}: cannot drop index {step.chosen_index}")
            if current != expected:
                raise ValueError(f"step {step.iteration}: support inconsistent with recorded {step.action.value}")
            if len(step.beta) != self.p:
                raise ValueError(f"step {step.iteration}: beta must have length {self.p}")
            if any(step.beta[j] != 0.0 for j in range(self.p) if j not in current):
                raise ValueError(f"step {step.iteration}: beta nonzero outside support")
            if abs(step.marginal_gain - (step.f_value - previous_f)) > GAIN_CONSISTENCY_TOL:
                raise ValueError(f"step {step.iteration}: marginal gain does not match f difference")
            if self.algorithm.forward_only and step.f_value < previous_f - self.solver.grad_tol:
                raise ValueError(f"step {step.iteration}: f decreased for {self.algorithm.value}")
            support = current
            previous_f = step.f_value
        return self

    @property
    def final_f_value(self) -> float:
        return self.steps[-1].f_value if self.steps else 0.0

    def support_at(self, position: int) -> Support:
        return Support.of(self.steps[position].support, self.p)

    def param_at(self, position: int) -> ParamVector:
        return ParamVector.from_dense(self.steps[position].beta, self.support_at(position))

    def final_support(self) -> Support:
        if not self.steps:
            return Support.of(self.fixed, self.p)
        return self.support_at(-1)

    def final_param(self) -> ParamVector:
        if not self.steps:
            return ParamVector.from_restricted([0.0] * len(self.fixed), Support.of(self.fixed, self.p))
        return self.param_at(-1)

    def selected(self, position: int = -1) -> List[int]:
        """Selected features (fixed columns excluded) of a step, ascending."""
        fixed = set(self.fixed)
        return [j for j in self.steps[position].support if j not in fixed]

    def states_by_size(self) -> Dict[int, int]:
        """Sparsity -> position of the last step whose selection has that size."""
        states = {}
        for position in range(len(self.steps)):
            states[len(self.selected(position))] = position
        return states

    def selection_order(self, position: int = -1) -> List[int]:
        """Features selected at `position`, ordered by when they were last added."""
        if not self.steps:
            return []
        position = position % len(self.steps)
        last_added = {}
        for i, step in enumerate(self.steps[: position + 1]):
            if step.action == StepAction.ADD:
                last_added[step.chosen_index] = i
        return sorted(self.selected(position), key=lambda j: last_added[j])
