"""Command-line interface.

Subcommands: gen, range, sweep, tail, norms, moments.  Every run writes
``manifest.json`` into the output directory before doing any work.

Exit codes: 0 ok, 1 usage error, 2 numerical failure, 3 ``--check`` failure.
The default seed is read from the SPECRANGE_SEED environment variable.
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__, experiments, tolerances
from .ensembles import EnsembleSpec, Kind, RngStream, sample
from .errors import InvalidSpec, NonConvergence, SpecRangeError
from .formats import SCHEMA_LINE, fmt, read_matrix, write_binary, write_csv, write_json
from .linalg import eigenvalues_general
from .metrics import metrics_report
from .numrange import DEFAULT_GRID, convex_hull, support_profile, write_profile_csv
from .svg import render_range_svg

log = logging.getLogger("specrange")

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_CHECK = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def default_seed() -> int:
    value = os.environ.get("SPECRANGE_SEED")
    if value is None:
        return 0
    try:
        return int(value)
    except ValueError:
        raise UsageError(f"SPECRANGE_SEED must be an integer, got {value!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="master seed (default: $SPECRANGE_SEED or 0)")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--threads", type=int, default=1, help="worker threads")
    p.add_argument("--check", action="store_true", help="exit 3 if acceptance thresholds fail")


def _add_ensemble(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--ensemble", choices=[k.value for k in Kind], required=required)
    p.add_argument("--k", type=int, default=None, help="block count for triangular-block")
    p.add_argument("--weight", type=float, default=None, help="mixture weight a")
    p.add_argument("--base", choices=[k.value for k in Kind], default=None, help="mixture base ensemble")
    p.add_argument("--axis-a", type=float, default=None)
    p.add_argument("--axis-b", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="specrange", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="sample one matrix, write binary and CSV forms")
    _add_common(p)
    _add_ensemble(p)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("range", help="numerical range, spectrum, metrics and SVG of one matrix")
    _add_common(p)
    _add_ensemble(p, required=False)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--matrix", type=Path, default=None, help="matrix file (binary or CSV)")
    p.add_argument("--m", type=int, default=DEFAULT_GRID, help="number of support directions")
    p.add_argument("--target-radius", type=float, default=None)

    p = sub.add_parser("sweep", help="metrics over a list of dimensions")
    _add_common(p)
    _add_ensemble(p)
    p.add_argument("--n", type=_int_list, required=True, help="comma-separated dimensions")
    p.add_argument("--trials", type=int, default=8)
    p.add_argument("--m", type=int, default=DEFAULT_GRID)
    p.add_argument("--target-radius", type=float, default=None)

    p = sub.add_parser("tail", help="empirical tail probabilities")
    _add_common(p)
    _add_ensemble(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=400)
    p.add_argument("--statistic", choices=experiments.STATISTICS, default="re_part_norm_deviation")
    p.add_argument("--epsilons", type=_float_list, default=[0.01, 0.02, 0.05, 0.1, 0.2, 0.3])
    p.add_argument("--radius", type=float, default=math.sqrt(2))
    p.add_argument("--m", type=int, default=DEFAULT_GRID)
    p.add_argument("--constants", type=_float_list, default=None,
                   help="C,c for overlaying the bound shape (plotting only)")

    p = sub.add_parser("norms", help="operator norms of triangular Gaussian matrices")
    _add_common(p)
    p.add_argument("--n", type=_int_list, required=True)
    p.add_argument("--k", type=_int_list, default=[4, 16, 64], help="block counts")
    p.add_argument("--trials", type=int, default=8)

    p = sub.add_parser("moments", help="N^-1 Tr((T T*)^l) against l^l/(l+1)!")
    _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=16)
    p.add_argument("--lmax", type=int, default=5)
    return parser


def spec_from_args(args, n: int) -> EnsembleSpec:
    kind = Kind(args.ensemble)
    base = None
    if kind is Kind.MIXTURE:
        if args.base is None or args.weight is None:
            raise UsageError("mixture needs --base and --weight")
        base = EnsembleSpec(Kind(args.base), n)
    spec = EnsembleSpec(kind, n, k=args.k, weight=args.weight, base=base,
                        axis_a=args.axis_a, axis_b=args.axis_b)
    try:
        spec.validate()
    except InvalidSpec as exc:
        raise UsageError(str(exc))
    return spec


# ---------------------------------------------------------------------------
# subcommands; each returns an exit code
# ---------------------------------------------------------------------------

def cmd_gen(args) -> int:
    spec = spec_from_args(args, args.n)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "manifest.json", {"command": "gen", "spec": spec.to_dict(), "master_seed": args.seed,
                                       "stream_index": 0, "code_version": __version__})
    x = sample(spec, RngStream(args.seed, 0))
    stem = f"{spec.kind.value}-n{spec.n}-s{args.seed}"
    write_binary(out / f"{stem}.bin", x)
    write_csv(out / f"{stem}.csv", x)
    print(out / f"{stem}.bin")
    print(out / f"{stem}.csv")
    return EXIT_OK


def cmd_range(args) -> int:
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    if args.matrix is not None:
        source = {"matrix": str(args.matrix)}
    elif args.ensemble is not None and args.n is not None:
        spec = spec_from_args(args, args.n)
        source = {"spec": spec.to_dict(), "master_seed": args.seed, "stream_index": 0}
    else:
        raise UsageError("range needs --matrix or --ensemble with --n")
    write_json(out / "manifest.json", {"command": "range", **source, "m": args.m,
                                       "target_radius": args.target_radius, "code_version": __version__})
    x = read_matrix(args.matrix) if args.matrix is not None else sample(spec, RngStream(args.seed, 0))
    profile = support_profile(x, args.m, threads=args.threads)
    spectrum = eigenvalues_general(x)
    report = metrics_report(x, m=args.m, target_radius=args.target_radius, profile=profile)
    write_profile_csv(out / "profile.csv", profile)
    lines = [SCHEMA_LINE, "re,im"] + [f"{fmt(z.real)},{fmt(z.imag)}" for z in spectrum]
    (out / "spectrum.csv").write_text("\n".join(lines) + "\n")
    (out / "metrics.json").write_text(report.to_json())
    hull = convex_hull(profile.boundary)
    title = source.get("spec", {}).get("kind", Path(str(source.get("matrix", ""))).name)
    (out / "range.svg").write_text(render_range_svg(spectrum, hull.vertices, args.target_radius,
                                                    title=f"{title}  N={x.shape[0]}"))
    print(report.to_json(), end="")
    if args.check and args.target_radius is not None:
        if report.hausdorff_to_target > tolerances.HAUSDORFF_MAX_AT_1024:
            print(f"CHECK FAIL: d_H = {report.hausdorff_to_target:.4g} > {tolerances.HAUSDORFF_MAX_AT_1024}")
            return EXIT_CHECK
    return EXIT_OK


def sweep_trend_ok(medians: list[float], allowance: float = tolerances.SWEEP_INVERSION_ALLOWANCE) -> bool:
    """Strictly decreasing, except for at most one increase of <= allowance (relative)."""
    inversions = 0
    for a, b in zip(medians, medians[1:]):
        if b < a:
            continue
        inversions += 1
        if inversions > 1 or b > a * (1 + allowance):
            return False
    return True


def cmd_sweep(args) -> int:
    spec = spec_from_args(args, args.n[0])
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "manifest.json", {"command": "sweep", **experiments.manifest(
        spec, args.n, args.trials, args.m, args.seed, target_radius=args.target_radius)})
    records = experiments.run_sweep(spec, args.n, args.trials, m=args.m, target_radius=args.target_radius,
                                    master_seed=args.seed, threads=args.threads)
    (out / "records.csv").write_text(experiments.records_csv(records))
    summary = experiments.aggregate(records)
    write_json(out / "summary.json", {"failure_fraction": experiments.failure_fraction(records),
                                      "by_n": summary})
    rows = []
    nan = {"mean": float("nan"), "median": float("nan")}
    for row in summary:
        rows.append([row["n"], row["trials"], row["failed"], row.get("operator_norm", nan)["mean"],
                     row.get("numerical_radius", nan)["mean"], row.get("spectral_radius", nan)["mean"],
                     row.get("hausdorff_to_target", nan)["median"]])
    print(experiments.format_table(["n", "trials", "failed", "mean_norm", "mean_r", "mean_rho", "median_dH"], rows))
    if experiments.failure_fraction(records) > experiments.MAX_FAILURE_FRACTION:
        print("more than 1% of trials failed", file=sys.stderr)
        return EXIT_NUMERICAL
    if args.check and args.target_radius is not None:
        medians = [r[-1] for r in rows]
        ok = sweep_trend_ok(medians) and medians[-1] <= tolerances.HAUSDORFF_MAX_AT_1024
        print(f"CHECK {'PASS' if ok else 'FAIL'}: median d_H trend {[round(m, 4) for m in medians]}")
        if not ok:
            return EXIT_CHECK
    return EXIT_OK


def tail_monotone_ok(est: experiments.TailEstimate) -> bool:
    half = (est.wilson_high - est.wilson_low) / 2
    for i in range(len(est.epsilons) - 1):
        if est.empirical[i] < est.empirical[i + 1] - 2 * (half[i] + half[i + 1]):
            return False
    return True


def cmd_tail(args) -> int:
    spec = spec_from_args(args, args.n)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    constants = tuple(args.constants) if args.constants else None
    if constants is not None and len(constants) != 2:
        raise UsageError("--constants takes exactly two numbers C,c")
    write_json(out / "manifest.json", {"command": "tail", **experiments.manifest(
        spec, [args.n], args.trials, args.m, args.seed, statistic=args.statistic,
        epsilons=list(args.epsilons), radius=args.radius, constants=list(constants) if constants else None)})
    est = experiments.tail_estimate(spec, args.n, args.trials, args.statistic, args.epsilons,
                                    master_seed=args.seed, radius=args.radius, m=args.m,
                                    constants=constants, threads=args.threads)
    rows = est.rows()
    cols = list(rows[0].keys())
    lines = [SCHEMA_LINE, ",".join(cols)]
    lines += [",".join(fmt(r[c]) if isinstance(r[c], float) else str(r[c]) for c in cols) for r in rows]
    (out / "tail.csv").write_text("\n".join(lines) + "\n")
    write_json(out / "summary.json", {"statistic": est.statistic, "n": est.n, "trials": est.trials,
                                      "radius": est.radius, "rows": rows, "values": est.values.tolist()})
    print(experiments.format_table(cols, [[r[c] for c in cols] for r in rows]))
    if args.check:
        ok = tail_monotone_ok(est)
        print(f"CHECK {'PASS' if ok else 'FAIL'}: empirical tail monotone within Wilson noise")
        if not ok:
            return EXIT_CHECK
    return EXIT_OK


def cmd_norms(args) -> int:
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "manifest.json", {"command": "norms", "n_list": args.n, "k_list": args.k,
                                       "trials": args.trials, "master_seed": args.seed,
                                       "code_version": __version__})
    if any(k > min(args.n) or k < 1 for k in args.k):
        raise UsageError(f"every k must satisfy 1 <= k <= {min(args.n)}")
    table = experiments.norm_convergence_study(args.n, args.k, args.trials, args.seed, threads=args.threads)
    plain = [experiments.triangular_norms(n, args.trials, args.seed, threads=args.threads) for n in args.n]
    dicts = table.to_dicts()
    cols = list(dicts[0].keys())
    lines = [SCHEMA_LINE, ",".join(cols)]
    lines += [",".join(fmt(d[c]) if isinstance(d[c], float) else str(d[c]) for c in cols) for d in dicts]
    (out / "norms.csv").write_text("\n".join(lines) + "\n")
    write_json(out / "summary.json", {"block_table": dicts, "triangular": plain})
    print(experiments.format_table(cols, [[d[c] for c in cols] for d in dicts]))
    print()
    print(experiments.format_table(
        ["n", "trials", "mean ||Tbar||", "sqrt(e)", "mean ||T||", "sqrt(2e)"],
        [[p["n"], p["trials"], p["mean_bar_norm"], p["limit_bar"], p["mean_strict_norm"], p["limit_strict"]]
         for p in plain]))
    if args.check:
        ok = all(r.mean_abs_diff <= r.bound for r in table.rows)
        for p in plain:
            ok &= tolerances.TBAR_NORM_BAND[0] <= p["mean_bar_norm"] <= tolerances.TBAR_NORM_BAND[1]
            ok &= tolerances.T_NORM_BAND[0] <= p["mean_strict_norm"] <= tolerances.T_NORM_BAND[1]
        print(f"CHECK {'PASS' if ok else 'FAIL'}: block differences <= 3/sqrt(k), norms within bands")
        if not ok:
            return EXIT_CHECK
    return EXIT_OK


def cmd_moments(args) -> int:
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "manifest.json", {"command": "moments", "n": args.n, "trials": args.trials,
                                       "lmax": args.lmax, "master_seed": args.seed,
                                       "code_version": __version__})
    if args.lmax < 1:
        raise UsageError("--lmax must be >= 1")
    rows = experiments.moment_study(args.n, args.trials, args.lmax, args.seed, threads=args.threads)
    header = ["ell", "mean", "stderr", "limit", "rel_error"]
    table = [[r.ell, r.mean, r.stderr, r.limit, r.relative_error] for r in rows]
    lines = [SCHEMA_LINE, ",".join(header)]
    lines += [",".join(str(c) if isinstance(c, int) else fmt(c) for c in row) for row in table]
    (out / "moments.csv").write_text("\n".join(lines) + "\n")
    write_json(out / "summary.json", {"n": args.n, "trials": args.trials, "rows": [
        dict(zip(header, row)) for row in table]})
    print(experiments.format_table(header, table))
    if args.check:
        ok = all(r.relative_error <= tolerances.MOMENT_REL_TOL.get(r.ell, 0.10) for r in rows)
        print(f"CHECK {'PASS' if ok else 'FAIL'}: moments within tolerance of l^l/(l+1)!")
        if not ok:
            return EXIT_CHECK
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "range": cmd_range, "sweep": cmd_sweep, "tail": cmd_tail,
            "norms": cmd_norms, "moments": cmd_moments}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.seed is None:
            args.seed = default_seed()
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"specrange: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NonConvergence, np.linalg.LinAlgError) as exc:
        print(f"specrange: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (SpecRangeError, ValueError, OSError) as exc:
        print(f"specrange: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
