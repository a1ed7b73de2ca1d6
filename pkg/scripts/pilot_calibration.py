#!/usr/bin/env python3
"""High-trial pilot run used to sanity-check the frozen thresholds in
``specrange.tolerances``.  Prints a summary and writes pilot.json.

    python scripts/pilot_calibration.py --out scripts/output/pilot
"""
from __future__ import annotations

import argparse
import math
import statistics
import time
from pathlib import Path

import numpy as np

from specrange import experiments
from specrange.ensembles import EnsembleSpec, Kind
from specrange.formats import write_json

PILOT_SEED = 20240101


def summarize(values) -> dict:
    v = np.asarray(values, dtype=float)
    return {"mean": float(v.mean()), "sd": float(v.std(ddof=1)) if v.size > 1 else 0.0,
            "median": float(statistics.median(v)), "min": float(v.min()), "max": float(v.max())}


def sweep_stats(kind: Kind, n: int, trials: int, threads: int) -> dict:
    recs = experiments.run_sweep(EnsembleSpec(kind, n), [n], trials, target_radius=math.sqrt(2),
                                 master_seed=PILOT_SEED, threads=threads)
    ok = [r.metrics for r in recs if r.metrics is not None]
    out = {"trials": trials, "failed": trials - len(ok)}
    for name in ("operator_norm", "numerical_radius", "spectral_radius", "mu3_squared_over_n",
                 "area_ratio", "hausdorff_to_target"):
        vals = [getattr(m, name) for m in ok if getattr(m, name) is not None]
        if vals:
            out[name] = summarize(vals)
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("scripts/output/pilot"))
    ap.add_argument("--n", type=int, default=1024)
    ap.add_argument("--trials", type=int, default=16)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    result = {"master_seed": PILOT_SEED, "n": args.n, "trials": args.trials}
    for kind in (Kind.GINIBRE_COMPLEX, Kind.TRIANGULAR_STRICT):
        result[kind.value] = sweep_stats(kind, args.n, args.trials, args.threads)
        print(kind.value, result[kind.value], flush=True)
    norms = experiments.triangular_norms(2 * args.n, args.trials, PILOT_SEED, args.threads)
    result["triangular_norms_2n"] = {"n": 2 * args.n, "bar": summarize(norms["bar_norms"]),
                                     "strict": summarize(norms["strict_norms"])}
    print("norms", result["triangular_norms_2n"], flush=True)
    table = experiments.norm_convergence_study([args.n], [4, 16, 64], args.trials, PILOT_SEED, args.threads)
    result["block_norms"] = table.to_dicts()
    print("blocks", result["block_norms"], flush=True)
    rows = experiments.moment_study(args.n, args.trials, 5, PILOT_SEED, args.threads)
    result["moments"] = [{"ell": r.ell, "mean": r.mean, "stderr": r.stderr, "limit": r.limit,
                          "rel_error": r.relative_error} for r in rows]
    print("moments", result["moments"], flush=True)
    result["seconds"] = time.perf_counter() - t0
    write_json(args.out / "pilot.json", result)
    print(f"wrote {args.out / 'pilot.json'} in {result['seconds']:.0f} s")


if __name__ == "__main__":
    main()
