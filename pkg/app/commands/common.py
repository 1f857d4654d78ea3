"""Argument groups and loaders shared by the subcommands."""
import argparse
from typing import Any, Dict, Sequence

from app.core.config import settings
from app.models.dataset import Dataset, LabelEncoding, add_bias
from app.schemas.objective import OBJECTIVE_ALIASES, ObjectiveSpec
from app.schemas.solver import SolverConfig
from app.services.evaluation import r_squared
from app.services.storage import read_dataset

# never part of provenance: they do not change results
_VOLATILE = {"func", "threads", "log_level"}


def add_objective_args(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument("--objective", required=required, choices=sorted(OBJECTIVE_ALIASES),
                        help="ls = least squares (R^2), logistic, logistic-l2")
    parser.add_argument("--eta", type=float, default=0.0, help="l2 weight for logistic-l2")


def add_data_args(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument("--data", required=required, help="CSV file, last column is the response")
    parser.add_argument("--header", action=argparse.BooleanOptionalAction, default=True,
                        help="first CSV row holds column names")
    parser.add_argument("--add-bias", action="store_true",
                        help="prepend a column of ones that every support keeps (index 0)")
    add_objective_args(parser, required)


def add_solver_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--grad-tol", type=float, default=settings.SOLVER_GRAD_TOL)
    parser.add_argument("--max-iters", type=int, default=settings.SOLVER_MAX_ITERS)
    add_run_args(parser)


def add_run_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--threads", type=int, default=settings.THREADS,
                        help="worker cap (default: all cores); results do not depend on it")
    parser.add_argument("--seed", type=int, default=0)


def objective_from_args(args: argparse.Namespace) -> ObjectiveSpec:
    return ObjectiveSpec(kind=OBJECTIVE_ALIASES[args.objective], eta=args.eta)


def solver_from_args(args: argparse.Namespace) -> SolverConfig:
    return SolverConfig(grad_tol=args.grad_tol, max_iters=args.max_iters)


def load_data(args: argparse.Namespace, spec: ObjectiveSpec) -> Dataset:
    encoding = LabelEncoding.BINARY01 if spec.is_logistic else LabelEncoding.REAL
    data = read_dataset(args.data, encoding, header=args.header)
    return add_bias(data) if args.add_bias else data


def provenance(args: argparse.Namespace, **extra) -> Dict[str, Any]:
    resolved = {key: value for key, value in sorted(vars(args).items()) if key not in _VOLATILE}
    return {"command": args.command, "args": resolved, **extra}


def format_indices(indices: Sequence[int]) -> str:
    return "{" + ", ".join(str(j) for j in indices) + "}"


def value_lines(spec: ObjectiveSpec, data: Dataset, f_value: float) -> Sequence[str]:
    lines = [f"f {f_value:.10g}"]
    if spec.is_quadratic and not data.fixed:
        lines.append(f"R^2 {round(r_squared(f_value, data), 9)}")
    return lines
