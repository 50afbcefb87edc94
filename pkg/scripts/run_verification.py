#!/usr/bin/env python3
"""Run every verification suite at desk scale and exit nonzero on failure."""

import argparse
import sys
import time

from nopivot import verify
from nopivot.randgen import FiniteSet, Seed, parse_seed


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=parse_seed, default=20120)
    args = parser.parse_args(argv)
    seed = Seed(args.seed)

    suites = [
        lambda: verify.check_spectral_bounds(seed, trials=1000, max_size=12),
        lambda: verify.check_tail_bounds(seed, samples=10_000),
        lambda: verify.check_finite_set_singularity(
            seed, k=3, delta=FiniteSet(tuple(range(10))), trials=100_000
        ),
        lambda: verify.check_safety_bounds(seed, trials=100, n=16),
        lambda: verify.check_perturbation(seed, trials=150, max_size=12),
    ]
    all_passed = True
    for suite in suites:
        start = time.time()
        report = suite()
        print(f"# {report.title} ({time.time() - start:.1f} s)")
        for line in report.lines():
            print(line)
        print()
        all_passed &= report.passed
    return 0 if all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
