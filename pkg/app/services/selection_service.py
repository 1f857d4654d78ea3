import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.core.exceptions import ConvergenceError, SeparationError, ValidationError
from app.core.parallel import parallel_map
from app.models.support import ParamVector, Support
from app.schemas.trace import Algorithm, SelectionStep, SelectionTrace, StepAction
from app.services.solver_service import RestrictedFit, RestrictedSolver

logger = logging.getLogger(__name__)

FOBA_STEP_FACTOR = 10


def _argmax_smallest_index(candidates: Sequence[int], scores: Sequence[float]) -> Tuple[int, float]:
    """Largest score; the smallest index wins exact ties whatever the evaluation order."""
    best_index, best_score = -1, -np.inf
    for j, score in sorted(zip(candidates, scores)):
        if score > best_score:
            best_index, best_score = j, score
    return best_index, best_score


class SelectionService:
    """Oblivious, Forward Stepwise, OMP and FoBa support selection.

    Every run returns a SelectionTrace; candidate refits are spread over
    `threads` workers but the chosen supports never depend on scheduling.
    With `stop_on_separation`, a step whose refit hits perfectly separable
    data ends the trace early instead of raising.
    """

    def __init__(self, solver: RestrictedSolver, threads: Optional[int] = None, seed: int = 0,
                 stop_on_separation: bool = False):
        self.solver = solver
        self.threads = threads
        self.seed = seed
        self.stop_on_separation = stop_on_separation

    @property
    def p(self) -> int:
        return self.solver.p

    def _candidates(self, support: Support) -> List[int]:
        taken = set(support.indices) | set(self.solver.data.fixed)
        return [j for j in range(self.p) if j not in taken]

    def _check_sparsity(self, k: int, name: str = "k") -> None:
        limit = len(self.solver.data.selectable)
        if not 1 <= k <= limit:
            raise ValidationError(f"{name} must be in [1, {limit}], got {k}")

    def _new_trace(self, algorithm: Algorithm) -> SelectionTrace:
        return SelectionTrace(
            algorithm=algorithm,
            objective=self.solver.spec,
            solver=self.solver.config,
            seed=self.seed,
            p=self.p,
            fixed=list(self.solver.data.fixed),
        )

    @staticmethod
    def _record(steps: List[SelectionStep], action: StepAction, index: int, fit: RestrictedFit) -> None:
        previous = steps[-1].f_value if steps else 0.0
        steps.append(SelectionStep(
            iteration=len(steps) + 1,
            action=action,
            chosen_index=index,
            support=fit.beta.support.to_list(),
            beta=fit.beta.beta.tolist(),
            f_value=fit.f_value,
            marginal_gain=fit.f_value - previous,
        ))

    def _finish(self, trace: SelectionTrace, steps: List[SelectionStep]) -> SelectionTrace:
        result = SelectionTrace.model_validate({**trace.model_dump(), "steps": [s.model_dump() for s in steps]})
        logger.info(
            f"{trace.algorithm.value}: selected {result.selection_order()} "
            f"f={result.final_f_value:.6g} in {len(steps)} steps"
        )
        return result

    def _stop_early(self, algorithm: Algorithm, steps: List[SelectionStep], error: SeparationError) -> None:
        if not self.stop_on_separation:
            raise error
        size = len(steps[-1].support) - len(self.solver.data.fixed) if steps else 0
        logger.warning(f"{algorithm.value}: stopped at |S|={size}, next refit is separable ({error.detail})")

    def _best_addition(self, support: Support, current: ParamVector) -> Optional[Tuple[int, RestrictedFit]]:
        """Forward step: refit S u {j} for every candidate j and keep the largest f."""
        candidates = self._candidates(support)
        if not candidates:
            return None
        fits = parallel_map(lambda j: self.solver.fit(support.add(j), warm_start=current), candidates, self.threads)
        best, _ = _argmax_smallest_index(candidates, [fit.f_value for fit in fits])
        return best, fits[candidates.index(best)]

    def oblivious_select(self, k: int) -> SelectionTrace:
        """Rank features by singleton value f({j}) and refit jointly on the top k."""
        self._check_sparsity(k)
        empty = Support.empty(self.p)
        candidates = self._candidates(empty)
        scores = [0.0] * self.p
        steps: List[SelectionStep] = []
        support, current = empty, self.solver.base.beta
        try:
            singles = parallel_map(
                lambda j: self.solver.set_function_value(Support((j,), self.p)), candidates, self.threads
            )
            for j, value in zip(candidates, singles):
                scores[j] = value
            ranking = sorted(candidates, key=lambda j: (-scores[j], j))
            for j in ranking[:k]:
                support = support.add(j)
                fit = self.solver.fit(support, warm_start=current)
                current = fit.beta
                self._record(steps, StepAction.ADD, j, fit)
        except SeparationError as error:
            self._stop_early(Algorithm.OBLIVIOUS, steps, error)
        trace = self._new_trace(Algorithm.OBLIVIOUS).model_copy(update={"scores": scores})
        return self._finish(trace, steps)

    def forward_stepwise(self, r: int) -> SelectionTrace:
        self._check_sparsity(r, "r")
        steps: List[SelectionStep] = []
        support, current = Support.empty(self.p), self.solver.base.beta
        try:
            for _ in range(r):
                j, fit = self._best_addition(support, current)
                support, current = support.add(j), fit.beta
                self._record(steps, StepAction.ADD, j, fit)
        except SeparationError as error:
            self._stop_early(Algorithm.FORWARD_STEPWISE, steps, error)
        return self._finish(self._new_trace(Algorithm.FORWARD_STEPWISE), steps)

    def omp_select(self, r: int) -> SelectionTrace:
        """Add the coordinate with the largest |gradient| at the current restricted optimum."""
        self._check_sparsity(r, "r")
        steps: List[SelectionStep] = []
        support, current = Support.empty(self.p), self.solver.base.beta
        try:
            for _ in range(r):
                candidates = self._candidates(support)
                residual = np.abs(self.solver.objective.gradient(current.beta))
                j, _ = _argmax_smallest_index(candidates, residual[candidates].tolist())
                support = support.add(j)
                fit = self.solver.fit(support, warm_start=current)
                current = fit.beta
                self._record(steps, StepAction.ADD, j, fit)
        except SeparationError as error:
            self._stop_early(Algorithm.OMP, steps, error)
        return self._finish(self._new_trace(Algorithm.OMP), steps)

    def foba_select(self, k: int) -> SelectionTrace:
        """Forward stepwise with a backward pass after each addition.

        After an addition with gain g, the feature whose removal costs least is
        dropped while that cost is below g/2. Dropped features may re-enter.
        Stops once k features are selected or a forward step gains at most grad_tol.
        """
        self._check_sparsity(k)
        tol = self.solver.config.grad_tol
        budget = FOBA_STEP_FACTOR * k
        steps: List[SelectionStep] = []
        support, current = Support.empty(self.p), self.solver.base.beta
        f_current = 0.0

        try:
            while True:
                if len(steps) >= budget:
                    raise ConvergenceError(f"FoBa did not terminate within {budget} steps")
                addition = self._best_addition(support, current)
                if addition is None:
                    break
                j, fit = addition
                gain = fit.f_value - f_current
                if gain <= tol:
                    logger.info(f"foba: forward gain {gain:.3e} at |S|={len(support)}, stopping")
                    break
                support, current, f_current = support.add(j), fit.beta, fit.f_value
                self._record(steps, StepAction.ADD, j, fit)

                while len(support) > 0:
                    if len(steps) >= budget:
                        raise ConvergenceError(f"FoBa did not terminate within {budget} steps")
                    removable = list(support.indices)
                    fits = parallel_map(
                        lambda i: self.solver.fit(support.remove(i), warm_start=current), removable, self.threads
                    )
                    # least costly removal == largest remaining value
                    i, _ = _argmax_smallest_index(removable, [f.f_value for f in fits])
                    reduced = fits[removable.index(i)]
                    if f_current - reduced.f_value >= gain / 2.0:
                        break
                    support, current, f_current = support.remove(i), reduced.beta, reduced.f_value
                    self._record(steps, StepAction.DROP, i, reduced)

                if len(support) >= k:
                    break
        except SeparationError as error:
            self._stop_early(Algorithm.FOBA, steps, error)
        return self._finish(self._new_trace(Algorithm.FOBA), steps)

    def run(self, algorithm: Algorithm, k: int) -> SelectionTrace:
        runners = {
            Algorithm.OBLIVIOUS: self.oblivious_select,
            Algorithm.FORWARD_STEPWISE: self.forward_stepwise,
            Algorithm.OMP: self.omp_select,
            Algorithm.FOBA: self.foba_select,
        }
        return runners[algorithm](k)
