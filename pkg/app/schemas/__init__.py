from .objective import OBJECTIVE_ALIASES, ObjectiveKind, ObjectiveSpec
from .solver import SolverConfig
from .trace import ALGORITHM_ALIASES, Algorithm, SelectionStep, SelectionTrace, StepAction
from .analysis import (
    AnalysisReport, BoundCheck, ConcavityMethod, ConcavityParams, GammaValue, OracleResult
)
from .dataset import GroundTruth
from .experiment import ExperimentConfig

__all__ = [
    "OBJECTIVE_ALIASES", "ObjectiveKind", "ObjectiveSpec", "SolverConfig",
    "ALGORITHM_ALIASES", "Algorithm", "SelectionStep", "SelectionTrace", "StepAction",
    "AnalysisReport", "BoundCheck", "ConcavityMethod", "ConcavityParams", "GammaValue", "OracleResult",
    "GroundTruth", "ExperimentConfig",
]
