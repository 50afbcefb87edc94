#!/usr/bin/env python3
"""Reproduce the residual tables: GEPP baseline, plain GENP, and GENP with
Gaussian / circulant multipliers (with and without one refinement step).

Example:
    python scripts/run_tables.py --dims 64,256 --trials 100 --seed 20120
Large sizes work with reduced trial counts:
    python scripts/run_tables.py --dims 1024 --trials 10
"""

import argparse
import sys
import time

from nopivot import experiments, pipeline
from nopivot.randgen import parse_seed
from nopivot.reports import render_markdown


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dims", default="64,256", help="comma-separated powers of two")
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--seed", type=parse_seed, default=experiments.DEFAULT_MASTER_SEED)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)
    dims = tuple(int(tok) for tok in args.dims.split(",") if tok)

    runs = [
        ("gepp", None),
        ("genp", None),
        ("genp+plan", pipeline.PreconditionPlan(refinement_steps=1)),
        ("genp+plan", pipeline.PreconditionPlan(left="circulant", right="circulant", refinement_steps=1)),
    ]
    for method, plan in runs:
        config = experiments.ExperimentConfig(
            dims=dims, trials=args.trials, method=method, plan=plan, master_seed=args.seed
        )
        start = time.time()
        report = experiments.run_residual_experiment(config, workers=args.workers)
        print(render_markdown(report))
        print(f"({time.time() - start:.1f} s)\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
