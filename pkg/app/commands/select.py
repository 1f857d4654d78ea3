import argparse

import pandas as pd

from app.commands.common import (
    add_data_args,
    add_solver_args,
    format_indices,
    load_data,
    objective_from_args,
    provenance,
    solver_from_args,
    value_lines,
)
from app.schemas.trace import ALGORITHM_ALIASES, SelectionTrace
from app.services.storage import write_frame, write_model
from app.services.selection_service import SelectionService
from app.services.solver_service import RestrictedSolver


def register(subparsers) -> None:
    parser = subparsers.add_parser("select", help="run a greedy selection algorithm")
    parser.add_argument("--algo", required=True, choices=sorted(ALGORITHM_ALIASES))
    parser.add_argument("--k", type=int, required=True, help="sparsity (iterations r for fs/omp)")
    add_data_args(parser)
    add_solver_args(parser)
    parser.add_argument("--out", help="trace output path")
    parser.add_argument("--format", choices=["json", "csv"], default="json")
    parser.set_defaults(func=run)


def trace_frame(trace: SelectionTrace) -> pd.DataFrame:
    """One row per step; supports as space-separated indices."""
    return pd.DataFrame(
        [
            {
                "iteration": step.iteration,
                "action": step.action.value,
                "chosen_index": step.chosen_index,
                "support": " ".join(str(j) for j in step.support),
                "f_value": step.f_value,
                "marginal_gain": step.marginal_gain,
            }
            for step in trace.steps
        ],
        columns=["iteration", "action", "chosen_index", "support", "f_value", "marginal_gain"],
    )


def run(args: argparse.Namespace) -> int:
    spec = objective_from_args(args)
    data = load_data(args, spec)
    solver = RestrictedSolver(spec, data, solver_from_args(args))
    trace = SelectionService(solver, threads=args.threads, seed=args.seed).run(ALGORITHM_ALIASES[args.algo], args.k)
    trace = trace.model_copy(update={"provenance": provenance(args)})

    if args.out:
        if args.format == "json":
            write_model(trace, args.out)
        else:
            write_frame(trace_frame(trace), args.out)

    print(f"{trace.algorithm.value} k={args.k}")
    print(f"support {format_indices(trace.selection_order())}")
    for line in value_lines(spec, data, trace.final_f_value):
        print(line)
    return 0
