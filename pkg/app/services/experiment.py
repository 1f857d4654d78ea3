import logging
from typing import Dict, Iterable, List, Optional

import numpy as np
import pandas as pd

from app.models.dataset import Dataset, LabelEncoding, add_bias, validate_dataset
from app.models.support import ParamVector, Support
from app.schemas.experiment import ExperimentConfig
from app.schemas.trace import Algorithm, SelectionTrace
from app.services.datagen import (
    ar1_design,
    derive_seed,
    linear_responses,
    logistic_responses,
    rademacher_sparse_beta,
)
from app.services.evaluation import generalization_accuracy, ranking_auc, recall_at
from app.services.objective_service import ObjectiveService
from app.services.selection_service import SelectionService
from app.services.solver_service import RestrictedSolver

logger = logging.getLogger(__name__)

COLUMNS = ["run", "algo", "s", "metric", "value"]
SUMMARY_COLUMNS = ["algo", "metric", "s", "mean", "sem", "count"]

# per-run stream ids
STREAM_TRAIN_X = 0
STREAM_BETA = 1
STREAM_TRAIN_Y = 2
STREAM_TEST_X = 3
STREAM_TEST_Y = 4


def _responses(config: ExperimentConfig, X: np.ndarray, beta: ParamVector, seed: int) -> np.ndarray:
    if config.objective.is_logistic:
        return logistic_responses(X, beta, seed)
    return linear_responses(X, beta, config.noise_sigma, seed)


def generate_run_data(config: ExperimentConfig, run: int):
    """Train set, test set and true support for one run, all derived from (seed, run)."""
    run_seed = derive_seed(config.seed, run)
    encoding = LabelEncoding.BINARY01 if config.objective.is_logistic else LabelEncoding.REAL

    beta = rademacher_sparse_beta(config.p, config.k_true, config.beta_norm2, derive_seed(run_seed, STREAM_BETA))
    X = ar1_design(config.n, config.p, config.alpha, config.sigma2, derive_seed(run_seed, STREAM_TRAIN_X))
    X_test = ar1_design(config.n_test, config.p, config.alpha, config.sigma2, derive_seed(run_seed, STREAM_TEST_X))
    train = validate_dataset(X, _responses(config, X, beta, derive_seed(run_seed, STREAM_TRAIN_Y)), encoding)
    test = validate_dataset(X_test, _responses(config, X_test, beta, derive_seed(run_seed, STREAM_TEST_Y)), encoding)

    truth = beta.support
    if config.add_bias:
        train, test = add_bias(train), add_bias(test)
        truth = Support.of([j + 1 for j in truth], config.p + 1)
    return train, test, truth


def _normalized(objective: ObjectiveService, beta: ParamVector) -> float:
    """l(beta) - l(0)."""
    return objective.value(beta.beta) - objective.value(np.zeros(beta.p))


def trace_metrics(config: ExperimentConfig, trace: SelectionTrace, train: Dataset, test: Dataset,
                  truth: Support) -> List[Dict]:
    """Metric rows for every sparsity 1..s_max the trace reaches."""
    train_objective = ObjectiveService(config.objective, train)
    test_objective = ObjectiveService(config.objective, test)
    candidates = list(train.selectable)
    truth_indices = list(truth)
    rows = []
    for s, position in sorted(trace.states_by_size().items()):
        if not 1 <= s <= config.s_max:
            continue
        beta = trace.param_at(position)
        metrics = {
            "normalized_objective": _normalized(train_objective, beta),
            "auc": ranking_auc(trace.selection_order(position), truth_indices, candidates),
            "recall": recall_at(trace, position, truth_indices),
            "test_objective": _normalized(test_objective, beta),
        }
        if config.objective.is_logistic:
            metrics["accuracy"] = generalization_accuracy(config.objective, beta, test)
        rows.extend({"algo": trace.algorithm.value, "s": s, "metric": name, "value": float(value)}
                    for name, value in metrics.items())
    return rows


def run_experiment(config: ExperimentConfig, threads: Optional[int] = None) -> pd.DataFrame:
    """Long-format results (run, algo, s, metric, value), ordered by run then algorithm."""
    rows = []
    for run in range(config.runs):
        train, test, truth = generate_run_data(config, run)
        solver = RestrictedSolver(config.objective, train, config.solver)
        selector = SelectionService(solver, threads=threads, seed=derive_seed(config.seed, run),
                                    stop_on_separation=True)
        for algorithm in config.algorithms:
            trace = selector.run(algorithm, config.s_max)
            for row in trace_metrics(config, trace, train, test, truth):
                rows.append({"run": run, **row})
        logger.info(f"experiment run {run + 1}/{config.runs} done")
    return pd.DataFrame(rows, columns=COLUMNS)


def summarize(results: pd.DataFrame) -> pd.DataFrame:
    """Mean, standard error and count per (algo, metric, s)."""
    grouped = results.groupby(["algo", "metric", "s"], sort=False)["value"]
    summary = grouped.agg(["mean", "sem", "count"]).reset_index()
    return summary[SUMMARY_COLUMNS]


def ordering_failures(summary: pd.DataFrame, sparsities: Iterable[int],
                      metric: str = "normalized_objective") -> List[str]:
    """Departures from FS >= OMP >= Oblivious (one standard error of slack per gap),
    |FS - FoBa| within two standard errors, and AUC(FS) > AUC(Oblivious)."""
    table = summary[summary["metric"] == metric].set_index(["algo", "s"])
    failures = []

    def gap(better: Algorithm, worse: Algorithm, s: int):
        a, b = table.loc[(better.value, s)], table.loc[(worse.value, s)]
        return a["mean"] - b["mean"], float(np.hypot(a["sem"], b["sem"]))

    for s in sparsities:
        missing = [algo.value for algo in Algorithm if algo != Algorithm.FOBA and (algo.value, s) not in table.index]
        if missing:
            failures.append(f"s={s}: no results for {', '.join(missing)}")
            continue
        for better, worse in [(Algorithm.FORWARD_STEPWISE, Algorithm.OMP), (Algorithm.OMP, Algorithm.OBLIVIOUS)]:
            difference, se = gap(better, worse, s)
            if difference < -se:
                failures.append(f"s={s}: {better.value} below {worse.value} by {-difference:.4g} (se {se:.4g})")
        if (Algorithm.FOBA.value, s) in table.index:
            difference, se = gap(Algorithm.FORWARD_STEPWISE, Algorithm.FOBA, s)
            if abs(difference) > 2.0 * se:
                failures.append(f"s={s}: forward_stepwise and foba differ by {difference:.4g} (se {se:.4g})")

    auc = summary[summary["metric"] == "auc"].set_index(["algo", "s"])
    last = max(sparsities)
    keys = [(algo.value, last) for algo in (Algorithm.FORWARD_STEPWISE, Algorithm.OBLIVIOUS)]
    if not all(key in auc.index for key in keys):
        return failures
    if auc.loc[(Algorithm.FORWARD_STEPWISE.value, last), "mean"] <= auc.loc[(Algorithm.OBLIVIOUS.value, last), "mean"]:
        failures.append(f"s={last}: AUC of forward_stepwise does not exceed oblivious")
    return failures
