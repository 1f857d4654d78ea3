import argparse
import logging

from app.commands.common import (
    add_data_args,
    add_solver_args,
    load_data,
    objective_from_args,
    provenance,
    solver_from_args,
)
from app.core.exceptions import ValidationError
from app.schemas.analysis import AnalysisReport, IsometryCheck
from app.schemas.objective import ObjectiveKind, ObjectiveSpec
from app.schemas.trace import ALGORITHM_ALIASES, SelectionTrace
from app.services import bounds
from app.services.concavity import population_sparse_eigenvalues
from app.services.datagen import CovarianceModel
from app.services.storage import read_model, write_model
from app.services.verification_service import VerificationService

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("analyze", help="submodularity ratios, curvature and bound checks")
    parser.add_argument("--k", type=int, required=True)
    add_data_args(parser, required=False)
    add_solver_args(parser)
    parser.add_argument("--algo", nargs="+", choices=sorted(ALGORITHM_ALIASES),
                        default=["oblivious", "fs", "omp", "foba"])
    parser.add_argument("--exhaustive-gamma", action="store_true", help="also report gamma_(empty, k)")
    parser.add_argument("--trace", help="verify an existing trace JSON instead of running selection")
    parser.add_argument("--population", choices=[m.value for m in CovarianceModel],
                        help="sparse eigenvalues of a population covariance; no data needed")
    parser.add_argument("--p", type=int, help="population dimension")
    parser.add_argument("--a", type=float, default=0.0, help="spike of the spiked population")
    parser.add_argument("--r", type=int, default=1, help="extra steps r in the check M_k <= 2 m_(k+r)")
    parser.add_argument("--out", help="report JSON output path")
    parser.set_defaults(func=run)


def _population_report(args: argparse.Namespace) -> AnalysisReport:
    if args.p is None:
        raise ValidationError("--population needs --p")
    if args.r < 1 or args.k + args.r > args.p:
        raise ValidationError(f"--r must be in [1, {args.p - args.k}], got {args.r}")
    model = CovarianceModel(args.population)
    params = population_sparse_eigenvalues(model, args.p, args.k, a=args.a)
    extended = population_sparse_eigenvalues(model, args.p, args.k + args.r, a=args.a)
    isometry = IsometryCheck(
        s=args.k,
        r=args.r,
        M_s=params.M_k,
        m_sr=extended.m_k,
        holds=bounds.rip_condition(params.M_k, extended.m_k),
        spike_threshold=bounds.spiked_rip_threshold(args.k) if model == CovarianceModel.SPIKED else None,
    )
    return AnalysisReport(objective=ObjectiveSpec(kind=ObjectiveKind.LEAST_SQUARES), k=args.k,
                          params=[params, extended], isometry=isometry, provenance=provenance(args))


def run(args: argparse.Namespace) -> int:
    if args.population:
        report = _population_report(args)
    else:
        if not args.data or not args.objective:
            raise ValidationError("analyze needs --data and --objective (or --population)")
        spec = objective_from_args(args)
        data = load_data(args, spec)
        service = VerificationService(spec, data, solver_from_args(args), threads=args.threads, seed=args.seed)
        if args.trace:
            trace = read_model(SelectionTrace, args.trace)
            if trace.objective != spec:
                raise ValidationError(f"trace objective {trace.objective.kind.value} does not match --objective")
            report = service.verify_trace(trace, args.k)
        else:
            algorithms = [ALGORITHM_ALIASES[name] for name in args.algo]
            report = service.analyze(args.k, algorithms, exhaustive_gamma=args.exhaustive_gamma)
        report = report.model_copy(update={"provenance": {**report.provenance, **provenance(args)}})

    if args.out:
        write_model(report, args.out)

    print(f"analysis k={report.k}")
    if report.opt_support is not None:
        print(f"f_opt {report.f_opt:.10g} at {report.opt_support}")
    for params in report.params:
        print(f"k={params.k} m={params.m_k:.6g} M={params.M_k:.6g} M~={params.M_tilde_k:.6g} ({params.method.value})")
    if report.isometry is not None:
        iso = report.isometry
        verdict = "holds" if iso.holds else "fails"
        line = f"isometry s={iso.s} r={iso.r}: M_s={iso.M_s:.6g} 2m_(s+r)={2.0 * iso.m_sr:.6g} {verdict}"
        if iso.spike_threshold is not None:
            line += f" (spike threshold {iso.spike_threshold:.6g})"
        print(line)
    for gamma in report.gamma_values:
        value = "inf" if gamma.value is None else f"{gamma.value:.6g}"
        print(f"gamma U={gamma.U} k={gamma.k}: {value} ({gamma.skipped_pairs} of {gamma.pairs} pairs skipped)")
    for check in report.bound_checks:
        verdict = "pass" if check.passed else "FAIL"
        tag = "" if check.certified else " (not certified)"
        print(f"{check.theorem}: {verdict} lhs={check.lhs:.6g} rhs={check.rhs:.6g}{tag}")
    print(f"violations {len(report.violations)}")
    return 0
