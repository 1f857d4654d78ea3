import argparse
import logging

from app.commands.common import provenance
from app.core.exceptions import ValidationError
from app.models.dataset import LabelEncoding, validate_dataset
from app.schemas.dataset import GroundTruth
from app.services.datagen import (
    CovarianceModel,
    appendix_a_instance,
    ar1_design,
    derive_seed,
    gaussian_design,
    linear_responses,
    logistic_responses,
    rademacher_sparse_beta,
)
from app.services.storage import write_dataset, write_model

logger = logging.getLogger(__name__)

MODELS = ["ar1-logistic", "ar1-linear", "linear-gaussian", "spiked", "appendix-a"]


def register(subparsers) -> None:
    parser = subparsers.add_parser("simulate", help="generate a synthetic dataset as CSV")
    parser.add_argument("--model", required=True, choices=MODELS)
    parser.add_argument("--n", type=int, default=600)
    parser.add_argument("--p", type=int, default=200)
    parser.add_argument("--k-true", type=int, default=50)
    parser.add_argument("--alpha", type=float, default=0.3, help="AR(1) coefficient")
    parser.add_argument("--sigma2", type=float, default=5.0, help="AR(1) innovation variance")
    parser.add_argument("--beta-norm2", type=float, default=5.0)
    parser.add_argument("--noise-sigma", type=float, default=1.0, help="noise sd for linear responses")
    parser.add_argument("--a", type=float, default=0.5, help="spike of the spiked covariance")
    parser.add_argument("--z", type=float, default=0.1, help="appendix-a instance parameter")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--header", action=argparse.BooleanOptionalAction, default=True)
    parser.add_argument("--out", required=True, help="CSV output path")
    parser.add_argument("--truth-out", help="JSON output path for the generating beta")
    parser.set_defaults(func=run)


def run(args: argparse.Namespace) -> int:
    if args.model == "appendix-a":
        data, beta = appendix_a_instance(args.z), None
    else:
        design_seed, beta_seed, response_seed = (derive_seed(args.seed, stream) for stream in range(3))
        beta = rademacher_sparse_beta(args.p, args.k_true, args.beta_norm2, beta_seed)
        if args.model.startswith("ar1"):
            X = ar1_design(args.n, args.p, args.alpha, args.sigma2, design_seed)
        elif args.model == "linear-gaussian":
            X = gaussian_design(args.n, args.p, CovarianceModel.IDENTITY_PLUS_ONES, design_seed)
        else:
            X = gaussian_design(args.n, args.p, CovarianceModel.SPIKED, design_seed, a=args.a)

        if args.model == "ar1-logistic":
            data = validate_dataset(X, logistic_responses(X, beta, response_seed), LabelEncoding.BINARY01)
        else:
            data = validate_dataset(X, linear_responses(X, beta, args.noise_sigma, response_seed))

    write_dataset(data, args.out, header=args.header)
    if args.truth_out:
        if beta is None:
            raise ValidationError("--truth-out needs a model with a generating beta")
        write_model(GroundTruth.from_param(beta, **provenance(args)), args.truth_out)
    print(f"simulated {args.model}: n={data.n} p={data.p} -> {args.out}")
    return 0
