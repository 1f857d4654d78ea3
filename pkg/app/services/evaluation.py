import itertools
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import comb
from scipy.stats import rankdata

from app.core.config import settings
from app.core.exceptions import GuardExceededError, ValidationError
from app.core.parallel import parallel_map
from app.models.dataset import Dataset, LabelEncoding
from app.models.support import ParamVector, Support
from app.schemas.objective import ObjectiveSpec
from app.schemas.trace import SelectionTrace
from app.services.solver_service import RestrictedSolver

logger = logging.getLogger(__name__)

_CHUNK = 4096


@dataclass(frozen=True)
class RecoveryMetrics:
    auc: float
    recall_curve: List[float]


def brute_force_best_subset(solver: RestrictedSolver, k: int,
                            threads: Optional[int] = None) -> Tuple[Support, float]:
    """Best k-subset by enumeration; ties go to the lexicographically smallest support."""
    candidates = list(solver.data.selectable)
    if not 0 <= k <= len(candidates):
        raise ValidationError(f"k must be in [0, {len(candidates)}], got {k}")
    total = comb(len(candidates), k, exact=True)
    if total > settings.BRUTE_FORCE_LIMIT:
        raise GuardExceededError(
            f"C({len(candidates)}, {k}) = {total} subsets exceeds limit {settings.BRUTE_FORCE_LIMIT}"
        )
    if k == 0:
        return Support.empty(solver.p), 0.0

    best_support, best_value = None, -np.inf
    combinations = itertools.combinations(candidates, k)
    while True:
        chunk = list(itertools.islice(combinations, _CHUNK))
        if not chunk:
            break
        values = parallel_map(lambda c: solver.set_function_value(Support(c, solver.p)), chunk, threads)
        for subset, value in zip(chunk, values):  # lexicographic order
            if value > best_value:
                best_support, best_value = subset, value
    logger.debug(f"brute force k={k}: best {best_support} f={best_value:.6g} over {total} subsets")
    return Support(best_support, solver.p), float(best_value)


def ranking_auc(ranked: Sequence[int], truth: Sequence[int], candidates: Sequence[int]) -> float:
    """ROC AUC of a ranking: ranked features in order, every other candidate tied last.

    Computed with the Mann-Whitney rank-sum statistic (ties count one half).
    """
    truth_set = set(truth)
    candidates = list(candidates)
    positives = sum(1 for j in candidates if j in truth_set)
    negatives = len(candidates) - positives
    if positives == 0 or negatives == 0:
        return float("nan")
    position = {j: i for i, j in enumerate(ranked)}
    # higher score = ranked earlier; unranked features share score 0
    scores = np.array([len(ranked) - position[j] if j in position else 0 for j in candidates], dtype=float)
    ranks = rankdata(scores)
    is_positive = np.array([j in truth_set for j in candidates])
    rank_sum = float(np.sum(ranks[is_positive]))
    return (rank_sum - positives * (positives + 1) / 2.0) / (positives * negatives)


def recall_at(trace: SelectionTrace, position: int, truth: Sequence[int]) -> float:
    """Fraction of `truth` inside the selection recorded at step `position`."""
    truth_set = set(truth)
    return len(truth_set.intersection(trace.selected(position))) / len(truth_set)


def support_recovery_metrics(estimated: SelectionTrace, truth: Support) -> RecoveryMetrics:
    """AUC of the selection order against the true support, and recall per sparsity.

    recall_curve[s] is the fraction of the truth in the last recorded support of
    size s, the same state the experiment scores (a prefix of the selection
    order for forward-only algorithms).
    """
    fixed = set(estimated.fixed)
    truth_indices = [j for j in truth if j not in fixed]
    if not truth_indices:
        raise ValidationError("true support must be nonempty")
    candidates = [j for j in range(estimated.p) if j not in fixed]
    order = estimated.selection_order()
    states = estimated.states_by_size()
    recall = [0.0] + [recall_at(estimated, states[s], truth_indices) for s in range(1, max(states, default=0) + 1)]
    return RecoveryMetrics(auc=ranking_auc(order, truth_indices, candidates), recall_curve=recall)


def generalization_accuracy(spec: ObjectiveSpec, beta: ParamVector, test: Dataset) -> float:
    """Fraction of test points whose label matches sigmoid(<x, beta>) >= 1/2."""
    if not spec.is_logistic:
        raise ValidationError(f"generalization accuracy needs a logistic objective, got {spec.kind.value}")
    if test.label_encoding != LabelEncoding.BINARY01:
        raise ValidationError("generalization accuracy needs binary01 labels")
    if beta.p != test.p:
        raise ValidationError(f"dimension mismatch: beta has length {beta.p}, test data has {test.p} columns")
    # sigmoid(t) >= 1/2 exactly when t >= 0; ties predict 1
    predictions = (test.X @ beta.beta >= 0.0).astype(np.float64)
    return float(np.mean(predictions == test.y))


def r_squared(f_value: float, data: Dataset) -> float:
    """Least-squares f(S) expressed as the (uncentered) R^2 = y^T P_S y / ||y||^2."""
    norm2 = float(data.y @ data.y)
    if norm2 == 0.0:
        raise ValidationError("R^2 undefined for an all-zero response")
    return 2.0 * data.n * f_value / norm2
