#!/usr/bin/env python3
"""Two-sensor anomaly detection: open-loop randomized vs deterministic
adaptive selection, with both converse bounds overlaid.

Writes figure1.csv (plus a manifest) in the current directory; columns
are documented in the package README.  Expect the adaptive strategy to
dominate at every horizon, by roughly 13-18 dB at N = 500.
"""

import argparse
import sys

from fhat.cli import main as fhat_main


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=100000)
    ap.add_argument("--seed", type=int, default=2026)
    ap.add_argument("--workers", type=int, default=2)
    ap.add_argument("--output", default="figure1.csv")
    args = ap.parse_args()
    return fhat_main([
        "sweep", "--model", "table1", "--strategies", "ors,das",
        "--reference", "0", "--horizons", "100:500:100",
        "--trials", str(args.trials), "--seed", str(args.seed),
        "--strong", "binary", "--nu", "0.6",
        "--workers", str(args.workers), "--output", args.output,
    ])


if __name__ == "__main__":
    sys.exit(main())
