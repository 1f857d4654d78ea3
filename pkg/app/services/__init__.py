from . import bounds
from .objective_service import ObjectiveService
from .solver_service import RestrictedFit, RestrictedSolver, SetFunctionOracle
from .selection_service import SelectionService
from .verification_service import VerificationService

__all__ = [
    "bounds", "ObjectiveService", "RestrictedFit", "RestrictedSolver", "SetFunctionOracle",
    "SelectionService", "VerificationService",
]
