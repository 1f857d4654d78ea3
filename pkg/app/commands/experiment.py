import argparse

from app.commands.common import add_run_args
from app.schemas.experiment import ExperimentConfig
from app.services.experiment import run_experiment, summarize
from app.services.storage import read_model, summary_path, write_frame


def register(subparsers) -> None:
    parser = subparsers.add_parser("experiment", help="repeated synthetic selection benchmark")
    parser.add_argument("--config", help="ExperimentConfig JSON (defaults to the standard benchmark)")
    parser.add_argument("--out", required=True, help="long-format results CSV")
    add_run_args(parser)
    parser.set_defaults(func=run, seed=None)


def run(args: argparse.Namespace) -> int:
    config = read_model(ExperimentConfig, args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        config = ExperimentConfig.model_validate({**config.model_dump(), "seed": args.seed})

    results = run_experiment(config, threads=args.threads)
    summary = summarize(results)
    write_frame(results, args.out)
    write_frame(summary, summary_path(args.out))

    final = summary[(summary["metric"] == "normalized_objective") & (summary["s"] == summary["s"].max())]
    print(f"experiment: {config.runs} runs, s_max={config.s_max} -> {args.out}")
    for row in final.itertuples(index=False):
        print(f"{row.algo} s={row.s}: {row.mean:.6g} +- {row.sem:.3g}")
    return 0
