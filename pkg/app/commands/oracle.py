import argparse

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
from app.schemas.analysis import OracleResult
from app.services.evaluation import brute_force_best_subset, r_squared
from app.services.storage import write_model
from app.services.solver_service import RestrictedSolver


def register(subparsers) -> None:
    parser = subparsers.add_parser("oracle", help="best k-subset by exhaustive enumeration")
    parser.add_argument("--k", type=int, required=True)
    add_data_args(parser)
    add_solver_args(parser)
    parser.add_argument("--out", help="JSON output path")
    parser.set_defaults(func=run)


def run(args: argparse.Namespace) -> int:
    spec = objective_from_args(args)
    data = load_data(args, spec)
    solver = RestrictedSolver(spec, data, solver_from_args(args))
    support, f_value = brute_force_best_subset(solver, args.k, threads=args.threads)

    if args.out:
        result = OracleResult(
            objective=spec,
            k=args.k,
            support=support.to_list(),
            f_value=f_value,
            r_squared=r_squared(f_value, data) if spec.is_quadratic and not data.fixed else None,
            provenance=provenance(args),
        )
        write_model(result, args.out)

    print(f"oracle k={args.k}")
    print(f"support {format_indices(support.to_list())}")
    for line in value_lines(spec, data, f_value):
        print(line)
    return 0
