#!/usr/bin/env python3
"""Reproduce both recovery-error tables at the full reference configuration.

Writes results/table1/ and results/table2/ (trials.csv, summary.csv,
manifest.json). At 100 trials per distribution this takes on the order of an
hour on two cores; pass --trials 20 for a few-minute run that still satisfies
the acceptance bands.
"""

import argparse
import os
import sys

from ddpm1d.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=100, help="trials per distribution")
    parser.add_argument("--seed", type=int, default=0, help="base seed")
    parser.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    parser.add_argument("--out", default="results", help="output root directory")
    args = parser.parse_args()

    for experiment in ("table1", "table2"):
        print(f"=== {experiment} ({args.trials} trials/distribution) ===")
        code = cli_main([
            "run",
            "--experiment", experiment,
            "--trials", str(args.trials),
            "--seed", str(args.seed),
            "--workers", str(args.workers),
            "--out", os.path.join(args.out, experiment),
        ])
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
