#!/usr/bin/env python3
"""
Run the AR(1) logistic benchmark and check the algorithm ordering
"""
import os
import sys

# Add parent directory to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app.core.log import configure_logging
from app.schemas.experiment import ExperimentConfig
from app.services.experiment import ordering_failures, run_experiment, summarize
from app.services.storage import summary_path, write_frame


def main(out="results.csv", runs=20):
    configure_logging()
    config = ExperimentConfig(runs=runs)
    print(f"Running {config.runs} runs: n={config.n} p={config.p} k_true={config.k_true} s_max={config.s_max}")

    results = run_experiment(config)
    summary = summarize(results)
    write_frame(results, out)
    write_frame(summary, summary_path(out))

    failures = ordering_failures(summary, range(10, 71, 10))
    if failures:
        print(f"❌ {len(failures)} ordering failures:")
        for failure in failures:
            print(f"  - {failure}")
        return 1
    print("✅ forward stepwise >= OMP >= oblivious, FoBa close to forward stepwise")
    return 0


if __name__ == "__main__":
    sys.exit(main(*sys.argv[1:2]))
