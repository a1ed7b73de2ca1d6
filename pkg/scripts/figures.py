#!/usr/bin/env python3
"""Regenerate the standard figures and tables through the CLI.

    python scripts/figures.py --out scripts/output/figures [--n 1024] [--trials 8]

Each figure lands in its own subdirectory with a manifest, so any of them
can be reproduced with the printed command line.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from specrange import cli

ROOT2 = f"{math.sqrt(2):.17g}"


def figure_runs(n: int, trials: int) -> dict[str, list[str]]:
    sweep_n = ",".join(str(v) for v in (n // 8, n // 4, n // 2, n))
    return {
        # ranges with the sqrt(2) disk overlaid
        "range-ginibre": ["range", "--ensemble", "ginibre-complex", "--n", str(n), "--target-radius", ROOT2],
        "range-triangular": ["range", "--ensemble", "triangular-strict", "--n", str(n), "--target-radius", ROOT2],
        "range-diagonal": ["range", "--ensemble", "diagonalized-ginibre", "--n", str(n)],
        "range-ellipse": ["range", "--ensemble", "ellipse", "--axis-a", "1", "--axis-b", "0.5", "--n", str(n)],
        "range-mixture": ["range", "--ensemble", "mixture", "--base", "ginibre-complex", "--weight", "0.5",
                          "--n", str(n), "--target-radius", ROOT2],
        # Hausdorff distance to the disk along N
        "sweep-ginibre": ["sweep", "--ensemble", "ginibre-complex", "--n", sweep_n, "--trials", str(trials),
                          "--target-radius", ROOT2],
        "sweep-triangular": ["sweep", "--ensemble", "triangular-strict", "--n", sweep_n,
                             "--trials", str(trials), "--target-radius", ROOT2],
        # empirical tail of the real-part norm deviation
        "tail-ginibre": ["tail", "--ensemble", "ginibre-complex", "--n", str(n // 4), "--trials", str(25 * trials),
                         "--statistic", "re_part_norm_deviation", "--epsilons", "0,0.02,0.05,0.1,0.2"],
        # block-zeroed vs full triangular norms, and the Gram moments
        "norms": ["norms", "--n", f"{n // 2},{n}", "--k", ",".join(str(k) for k in (4, 16, 64) if k <= n // 2),
                  "--trials", str(trials)],
        "moments": ["moments", "--n", str(n), "--trials", str(2 * trials)],
    }


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("scripts/output/figures"))
    ap.add_argument("--n", type=int, default=256)
    ap.add_argument("--trials", type=int, default=8)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--only", nargs="*", default=None, help="subset of figure names")
    args = ap.parse_args()
    status = 0
    for name, argv in figure_runs(args.n, args.trials).items():
        if args.only and name not in args.only:
            continue
        full = argv + ["--seed", str(args.seed), "--threads", str(args.threads), "--out", str(args.out / name)]
        print("$ specrange " + " ".join(full), flush=True)
        rc = cli.main(full)
        if rc:
            print(f"{name}: exit {rc}", file=sys.stderr)
            status = max(status, rc)
    return status


if __name__ == "__main__":
    sys.exit(main())
