"""Monte Carlo orchestration.

Every trial owns an :class:`RngStream` whose index depends only on the
dimension and the trial number, so results do not depend on which other
dimensions are in a sweep, on execution order, or on the number of worker
threads.  Aggregates are computed from records sorted by (n, trial_index).
"""
from __future__ import annotations

import logging
import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.stats import binomtest

from . import __version__
from .ensembles import MASK64, EnsembleSpec, Kind, RngStream, block_mask, mix64, sample
from .errors import DomainError, InvalidSpec, SpecRangeError
from .formats import SCHEMA_LINE
from .linalg import extreme_eigenpairs, hermitian_part, operator_norm
from .metrics import MetricsReport, metrics_report, moment_limit, normalized_moments
from .numrange import DEFAULT_GRID, hausdorff_to_disk, support_profile

log = logging.getLogger(__name__)

MAX_FAILURE_FRACTION = 0.01


def trial_stream_index(n: int, trial_index: int) -> int:
    return mix64(n) ^ mix64((trial_index << 32) & MASK64)


def trial_stream(master_seed: int, n: int, trial_index: int) -> RngStream:
    return RngStream(master_seed, trial_stream_index(n, trial_index))


def _pool_map(fn: Callable, items: Sequence, threads: int) -> list:
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

@dataclass
class ExperimentRecord:
    spec: EnsembleSpec
    n: int
    trial_index: int
    master_seed: int
    metrics: Optional[MetricsReport]
    error: Optional[str] = None
    wall_time: float = field(default=0.0, compare=False)  # never persisted

    @property
    def stream_index(self) -> int:
        return trial_stream_index(self.n, self.trial_index)

    @staticmethod
    def csv_header() -> str:
        metric_names = [f.name for f in fields(MetricsReport) if f.name != "n"]
        return ",".join(["ensemble", "n", "trial_index", "master_seed", "stream_index"] + metric_names + ["error"])

    def csv_row(self) -> str:
        head = [self.spec.label(), str(self.n), str(self.trial_index), str(self.master_seed), str(self.stream_index)]
        if self.metrics is not None:
            cells = self.metrics.csv_row().split(",")[1:]
        else:
            cells = [""] * (len(fields(MetricsReport)) - 1)
        err = "" if self.error is None else '"' + self.error.replace('"', "'") + '"'
        return ",".join(head + cells + [err])


def run_trial(spec: EnsembleSpec, n: int, trial_index: int, master_seed: int,
              m: int = DEFAULT_GRID, target_radius: Optional[float] = None) -> ExperimentRecord:
    start = time.perf_counter()
    sized = spec.with_n(n)
    try:
        x = sample(sized, trial_stream(master_seed, n, trial_index))
        report = metrics_report(x, m=m, target_radius=target_radius)
        error = None
    except (SpecRangeError, np.linalg.LinAlgError) as exc:
        if isinstance(exc, InvalidSpec):
            raise
        log.warning("trial n=%d t=%d failed: %s", n, trial_index, exc)
        report, error = None, f"{type(exc).__name__}: {exc}"
    return ExperimentRecord(sized, n, trial_index, master_seed, report, error,
                            wall_time=time.perf_counter() - start)


def run_sweep(spec: EnsembleSpec, n_list: Sequence[int], trials: int, m: int = DEFAULT_GRID,
              target_radius: Optional[float] = None, master_seed: int = 0,
              threads: int = 1) -> list[ExperimentRecord]:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n_list = [int(n) for n in n_list]
    if not n_list or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be nonempty and strictly ascending")
    for n in n_list:
        spec.with_n(n).validate()
    tasks = [(n, t) for n in n_list for t in range(trials)]
    records = _pool_map(lambda nt: run_trial(spec, nt[0], nt[1], master_seed, m, target_radius), tasks, threads)
    return sorted(records, key=lambda r: (r.n, r.trial_index))


def failure_fraction(records: Sequence[ExperimentRecord]) -> float:
    if not records:
        return 0.0
    return sum(r.error is not None for r in records) / len(records)


AGGREGATED = ("operator_norm", "numerical_radius", "spectral_radius", "mu3_squared_over_n",
              "alpha", "hs_norm", "area_ratio", "hausdorff_to_target", "hausdorff_certified")


def aggregate(records: Sequence[ExperimentRecord]) -> list[dict]:
    """Per-dimension mean / median / max of each metric over successful trials."""
    records = sorted(records, key=lambda r: (r.n, r.trial_index))
    out = []
    for n in sorted({r.n for r in records}):
        group = [r for r in records if r.n == n]
        ok = [r.metrics for r in group if r.metrics is not None]
        row = {"n": n, "trials": len(group), "failed": len(group) - len(ok)}
        for name in AGGREGATED:
            vals = [getattr(mr, name) for mr in ok if getattr(mr, name) is not None]
            if vals:
                row[name] = {"mean": float(np.mean(vals)), "median": float(statistics.median(vals)),
                             "max": float(np.max(vals))}
        out.append(row)
    return out


def median_by_n(records: Sequence[ExperimentRecord], name: str) -> dict[int, float]:
    return {row["n"]: row[name]["median"] for row in aggregate(records) if name in row}


def records_csv(records: Sequence[ExperimentRecord]) -> str:
    lines = [SCHEMA_LINE, ExperimentRecord.csv_header()]
    lines += [r.csv_row() for r in sorted(records, key=lambda r: (r.n, r.trial_index))]
    return "\n".join(lines) + "\n"


def manifest(spec: EnsembleSpec, n_list: Sequence[int], trials: int, m: int, master_seed: int,
             **extra) -> dict:
    out = {"spec": spec.to_dict(), "n_list": [int(n) for n in n_list], "trials": int(trials),
           "m": int(m), "master_seed": int(master_seed), "code_version": __version__}
    out.update(extra)
    return out


# ---------------------------------------------------------------------------
# tail probabilities
# ---------------------------------------------------------------------------

STATISTICS = ("hausdorff_to_disk", "re_part_norm_deviation")


@dataclass
class TailEstimate:
    statistic: str
    n: int
    trials: int
    radius: float
    epsilons: np.ndarray
    exceedances: np.ndarray  # counts of trials with statistic > epsilon
    empirical: np.ndarray
    wilson_low: np.ndarray
    wilson_high: np.ndarray
    values: np.ndarray  # per-trial statistic, trial order
    bound_form: Optional[np.ndarray] = None

    def rows(self) -> list[dict]:
        out = []
        for j, eps in enumerate(self.epsilons):
            row = {"epsilon": float(eps), "exceedances": int(self.exceedances[j]), "trials": self.trials,
                   "empirical": float(self.empirical[j]), "wilson_low": float(self.wilson_low[j]),
                   "wilson_high": float(self.wilson_high[j])}
            if self.bound_form is not None:
                row["bound_form"] = float(self.bound_form[j])
            out.append(row)
        return out


def wilson_interval(k: int, trials: int) -> tuple[float, float]:
    ci = binomtest(int(k), int(trials)).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


def tail_bound_form(statistic: str, epsilons, n: int, C: float, c: float) -> np.ndarray:
    """Shape of the published bounds with user-supplied constants.

    hausdorff_to_disk: C eps^-2 exp(-c n eps^3);
    re_part_norm_deviation: C exp(-c n eps^{3/2}).
    """
    eps = np.asarray(epsilons, dtype=float)
    if statistic == "hausdorff_to_disk":
        with np.errstate(divide="ignore", over="ignore"):  # eps = 0 gives +inf
            return C * eps ** -2.0 * np.exp(-c * n * eps ** 3)
    return C * np.exp(-c * n * eps ** 1.5)


def _tail_statistic(spec: EnsembleSpec, n: int, t: int, master_seed: int, statistic: str,
                    radius: float, m: int) -> float:
    x = sample(spec.with_n(n), trial_stream(master_seed, n, t))
    if statistic == "hausdorff_to_disk":
        return hausdorff_to_disk(support_profile(x, m), radius).raw
    pairs = extreme_eigenpairs(hermitian_part(x, 0.0))
    return abs(max(pairs.hi_value, -pairs.lo_value) - radius)


def tail_estimate(spec: EnsembleSpec, n: int, trials: int, statistic: str, epsilons: Sequence[float],
                  master_seed: int = 0, radius: float = math.sqrt(2.0), m: int = DEFAULT_GRID,
                  constants: Optional[tuple[float, float]] = None, threads: int = 1) -> TailEstimate:
    """Empirical P(statistic > eps) with 95% Wilson intervals.

    ``re_part_norm_deviation`` is | ||Re X|| - radius |; ``hausdorff_to_disk``
    is the grid estimate of d_H(W(X), D(0, radius)).  Fewer than 100 trials
    give little resolution in the tail but are allowed.
    """
    if statistic not in STATISTICS:
        raise ValueError(f"statistic must be one of {STATISTICS}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    spec.with_n(n).validate()
    values = np.array(_pool_map(lambda t: _tail_statistic(spec, n, t, master_seed, statistic, radius, m),
                                list(range(trials)), threads))
    eps = np.asarray(sorted(float(e) for e in epsilons))
    counts = np.array([int(np.sum(values > e)) for e in eps])
    intervals = [wilson_interval(k, trials) for k in counts]
    bound = tail_bound_form(statistic, eps, n, *constants) if constants is not None else None
    return TailEstimate(statistic, n, trials, radius, eps, counts, counts / trials,
                        np.array([lo for lo, _ in intervals]), np.array([hi for _, hi in intervals]),
                        values, bound)


def mega_bound(R: float, A: float, eps: float, p_n: float, q_n_at_eps_sq: float) -> float:
    """p_N + 7 R eps^-2 q_N(eps^2), the bound on P(d_H(W(X_N), D(0,R)) > 4 A eps).

    Valid for A >= max(R, 1) and 0 < eps <= min(1/2, sqrt(R / (A + 1))).
    """
    if R <= 0:
        raise DomainError("R must be positive")
    if A < max(R, 1.0):
        raise DomainError(f"A={A} must be at least max(R, 1)={max(R, 1.0)}")
    limit = min(0.5, math.sqrt(R / (A + 1.0)))
    if not 0 < eps <= limit:
        raise DomainError(f"eps={eps} must lie in (0, {limit}]")
    return p_n + 7.0 * R * eps ** -2 * q_n_at_eps_sq


# ---------------------------------------------------------------------------
# triangular norms and moments
# ---------------------------------------------------------------------------

@dataclass
class NormRow:
    k: int
    n: int
    trials: int
    mean_block_norm: float
    mean_bar_norm: float
    mean_abs_diff: float
    max_abs_diff: float

    @property
    def bound(self) -> float:
        return 3.0 / math.sqrt(self.k)


@dataclass
class NormConvergenceTable:
    rows: list[NormRow]

    def to_dicts(self) -> list[dict]:
        return [{"k": r.k, "n": r.n, "trials": r.trials, "mean_block_norm": r.mean_block_norm,
                 "mean_bar_norm": r.mean_bar_norm, "mean_abs_diff": r.mean_abs_diff,
                 "max_abs_diff": r.max_abs_diff, "bound_3_over_sqrt_k": r.bound} for r in self.rows]


def coupled_block_pair(n: int, k: int, stream: RngStream) -> tuple[np.ndarray, np.ndarray]:
    """T-bar_N and T-bar_{N,k} built from the same draws."""
    bar = sample(EnsembleSpec(Kind.TRIANGULAR_BAR, n), stream)
    block = bar.copy()
    block[block_mask(n, k)] = 0.0
    return bar, block


def norm_convergence_study(n_list: Sequence[int], k_list: Sequence[int], trials: int,
                           master_seed: int = 0, threads: int = 1) -> NormConvergenceTable:
    n_list = [int(n) for n in n_list]
    k_list = [int(k) for k in k_list]
    if any(k < 1 or k > min(n_list) for k in k_list):
        raise InvalidSpec(f"every k must satisfy 1 <= k <= {min(n_list)}")

    def one(nt):
        n, t = nt
        stream = trial_stream(master_seed, n, t)
        bar = sample(EnsembleSpec(Kind.TRIANGULAR_BAR, n), stream)
        bar_norm = operator_norm(bar)
        block_norms = []
        for k in k_list:
            block = bar.copy()
            block[block_mask(n, k)] = 0.0
            block_norms.append(operator_norm(block))
        return n, t, bar_norm, block_norms

    results = sorted(_pool_map(one, [(n, t) for n in n_list for t in range(trials)], threads))
    rows = []
    for i, k in enumerate(k_list):
        for n in n_list:
            group = [r for r in results if r[0] == n]
            bars = np.array([r[2] for r in group])
            blocks = np.array([r[3][i] for r in group])
            diffs = np.abs(blocks - bars)
            rows.append(NormRow(k, n, len(group), float(blocks.mean()), float(bars.mean()),
                                float(diffs.mean()), float(diffs.max())))
    return NormConvergenceTable(rows)


def triangular_norms(n: int, trials: int, master_seed: int = 0, threads: int = 1) -> dict:
    """Operator norms of T-bar_N (limit sqrt(e)) and T_N (limit sqrt(2e)).

    Both matrices of a trial come from the same stream, so T_N is T-bar_N up to
    the factor sqrt(2N/(N-1)); each norm is still computed from its own matrix.
    """

    def one(t):
        stream = trial_stream(master_seed, n, t)
        bar = sample(EnsembleSpec(Kind.TRIANGULAR_BAR, n), stream)
        stream = trial_stream(master_seed, n, t)
        tri = sample(EnsembleSpec(Kind.TRIANGULAR_STRICT, n), stream)
        return operator_norm(bar), operator_norm(tri)

    norms = _pool_map(one, list(range(trials)), threads)
    bar = np.array([a for a, _ in norms])
    tri = np.array([b for _, b in norms])
    return {"n": n, "trials": trials, "bar_norms": bar.tolist(), "strict_norms": tri.tolist(),
            "mean_bar_norm": float(bar.mean()), "mean_strict_norm": float(tri.mean()),
            "limit_bar": math.sqrt(math.e), "limit_strict": math.sqrt(2 * math.e)}


@dataclass
class MomentRow:
    ell: int
    mean: float
    stderr: float
    limit: float
    finite_n_first: Optional[float] = None  # exact E value (N-1)/(2N) for ell = 1

    @property
    def relative_error(self) -> float:
        return abs(self.mean - self.limit) / self.limit


def moment_study(n: int, trials: int, lmax: int, master_seed: int = 0, threads: int = 1) -> list[MomentRow]:
    """Empirical E N^{-1} Tr((T-bar T-bar*)^l) against l^l / (l+1)!."""

    def one(t):
        bar = sample(EnsembleSpec(Kind.TRIANGULAR_BAR, n), trial_stream(master_seed, n, t))
        return normalized_moments(bar, lmax)

    samples = np.array(_pool_map(one, list(range(trials)), threads))
    rows = []
    for ell in range(1, lmax + 1):
        col = samples[:, ell - 1]
        stderr = float(col.std(ddof=1) / math.sqrt(trials)) if trials > 1 else float("nan")
        rows.append(MomentRow(ell, float(col.mean()), stderr, float(moment_limit(ell)),
                              (n - 1) / (2 * n) if ell == 1 else None))
    return rows


def format_table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [[c if isinstance(c, str) else f"{c:.6g}" if isinstance(c, float) else str(c) for c in row]
             for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
    return "\n".join(lines)
