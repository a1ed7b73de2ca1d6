"""Acceptance criteria 1-12.  Each test prints one PASS/FAIL line."""
import math
import time

import numpy as np
import pytest

import conftest
from oracles import brute_force_support, charpoly_eigenvalues, multiset_distance, random_hermitian
from specrange import cli, tolerances as tol
from specrange.ensembles import EnsembleSpec, Kind, RngStream, random_normal_matrix, sample
from specrange.experiments import (
    median_by_n, moment_study, norm_convergence_study, run_sweep, triangular_norms,
)
from specrange.linalg import eigenvalues_general, hermitian_eigh, operator_norm
from specrange.numrange import (
    StarBody, adaptive_range, grid, hausdorff_polygons, profile_in_star, spectrum_hull, support_profile,
)

SEED = 7
SWEEP_N = [128, 256, 512, 1024]
SWEEP_TRIALS = 8
SQRT2 = math.sqrt(2)


def report(k, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def in_band(v, band):
    return band[0] <= v <= band[1]


def mean_of(records, n, name):
    return float(np.mean([getattr(r.metrics, name) for r in records if r.n == n and r.metrics is not None]))


@pytest.fixture(scope="session")
def ginibre_sweep():
    t0 = time.perf_counter()
    recs = run_sweep(EnsembleSpec(Kind.GINIBRE_COMPLEX, SWEEP_N[0]), SWEEP_N, SWEEP_TRIALS,
                     target_radius=SQRT2, master_seed=SEED)
    return recs, time.perf_counter() - t0


@pytest.fixture(scope="session")
def triangular_sweep():
    return run_sweep(EnsembleSpec(Kind.TRIANGULAR_STRICT, SWEEP_N[0]), SWEEP_N, SWEEP_TRIALS,
                     target_radius=SQRT2, master_seed=SEED)


def test_criterion_01_jordan_disk():
    j2 = np.array([[0, 1], [0, 0]], dtype=complex)
    t0 = time.perf_counter()
    p = support_profile(j2, 256)
    elapsed = time.perf_counter() - t0
    err = float(np.abs(p.lambdas - 0.5).max())
    report(1, err <= tol.JORDAN_TOL and elapsed < 0.1,
           f"max |lambda - 1/2| = {err:.2e} (<= {tol.JORDAN_TOL:g}), runtime {elapsed * 1e3:.1f} ms (< 100 ms)")


def test_criterion_02_eigensolver_suite():
    rng = np.random.default_rng(SEED)
    worst_res = worst_orth = 0.0
    ordered = True
    for _ in range(200):
        n = int(rng.integers(2, 257))
        h = random_hermitian(rng, n)
        norm_h = np.linalg.norm(h, 2)
        for method in ("householder-ql", "lapack"):
            dec = hermitian_eigh(h, method)
            ordered &= bool(np.all(np.diff(dec.values) >= 0))
            res = np.linalg.norm(h @ dec.vectors - dec.vectors * dec.values, axis=0).max() / (n * norm_h)
            orth = np.abs(dec.vectors.conj().T @ dec.vectors - np.eye(n)).max() / n
            worst_res, worst_orth = max(worst_res, res), max(worst_orth, orth)
    oracle_err = 0.0
    for n in (4, 5):
        for _ in range(10):
            h = random_hermitian(rng, n)
            ref = np.sort(charpoly_eigenvalues(h).real)
            oracle_err = max(oracle_err, np.abs(hermitian_eigh(h, "householder-ql").values - ref).max())
            x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            ref = charpoly_eigenvalues(x)
            for method in ("hessenberg-qr", "lapack"):
                oracle_err = max(oracle_err, multiset_distance(eigenvalues_general(x, method), ref))
    ok = ordered and worst_res <= 1e-10 and worst_orth <= 1e-10 and oracle_err <= 1e-8
    report(2, ok, f"200 Hermitian n in 2..256: residual/(n||H||) {worst_res:.1e}, "
                  f"orthogonality/n {worst_orth:.1e} (<= 1e-10); 4x4/5x5 vs charpoly {oracle_err:.1e} (<= 1e-8)")


@pytest.mark.slow
def test_criterion_03_ginibre_limits(ginibre_sweep):
    recs, elapsed = ginibre_sweep
    n = 1024
    norm, r, rho = (mean_of(recs, n, k) for k in ("operator_norm", "numerical_radius", "spectral_radius"))
    mu = float(np.mean([r_.metrics.mu3 ** 2 / n for r_ in recs if r_.n == n]))
    ok = (in_band(norm, tol.GINIBRE_NORM_BAND) and in_band(r, tol.GINIBRE_RADIUS_BAND)
          and in_band(rho, tol.GINIBRE_SPECTRAL_RADIUS_BAND) and in_band(mu, tol.GINIBRE_MU3_BAND))
    report(3, ok, f"N=1024 means: ||G|| {norm:.4f}, r {r:.4f}, rho {rho:.4f}, mu3^2/N {mu:.4f}; "
                  f"full 4-size sweep {elapsed:.0f} s on one thread")


@pytest.mark.slow
def test_criterion_04_hausdorff_trend(ginibre_sweep, triangular_sweep):
    details, ok = [], True
    for name, recs in (("ginibre", ginibre_sweep[0]), ("triangular", triangular_sweep)):
        med = median_by_n(recs, "hausdorff_to_target")
        vals = [med[n] for n in SWEEP_N]
        good = cli.sweep_trend_ok(vals) and vals[-1] <= tol.HAUSDORFF_MAX_AT_1024
        ok &= good
        details.append(f"{name} medians {', '.join(f'{v:.4f}' for v in vals)}")
    report(4, ok, "; ".join(details) + f" (last <= {tol.HAUSDORFF_MAX_AT_1024})")


@pytest.mark.slow
def test_criterion_05_area_ratio(ginibre_sweep):
    ratio = mean_of(ginibre_sweep[0], 1024, "area_ratio")
    report(5, in_band(ratio, tol.AREA_RATIO_BAND), f"mean area ratio {ratio:.4f} in {tol.AREA_RATIO_BAND}")


@pytest.mark.slow
def test_criterion_06_triangular_norms():
    out = triangular_norms(2048, 8, master_seed=SEED)
    bar, strict = float(np.mean(out["bar_norms"])), float(np.mean(out["strict_norms"]))
    ok = in_band(bar, tol.TBAR_NORM_BAND) and in_band(strict, tol.T_NORM_BAND)
    report(6, ok, f"N=2048 mean ||Tbar|| {bar:.4f} in {tol.TBAR_NORM_BAND}, "
                  f"mean ||T|| {strict:.4f} in {tol.T_NORM_BAND}")


def test_criterion_07_moments():
    rows = moment_study(1024, 16, 5, master_seed=SEED)
    ok = all(r.relative_error <= tol.MOMENT_REL_TOL[r.ell] for r in rows)
    report(7, ok, "relative errors " + ", ".join(
        f"l={r.ell}: {r.relative_error:.4f} (<= {tol.MOMENT_REL_TOL[r.ell]})" for r in rows))


def test_criterion_08_block_norms():
    table = norm_convergence_study([1024], [4, 16, 64], 8, master_seed=SEED)
    ok = all(r.mean_abs_diff <= 3 / math.sqrt(r.k) for r in table.rows)
    report(8, ok, ", ".join(f"k={r.k}: {r.mean_abs_diff:.4f} (<= {3 / math.sqrt(r.k):.3f})" for r in table.rows))


def test_criterion_09_ellipse_containment():
    a, b = 1.0, 0.5
    body = StarBody.from_function(lambda t: SQRT2 * np.sqrt(a ** 2 * np.cos(t) ** 2 + b ** 2 * np.sin(t) ** 2),
                                  1 << 14)
    spec = EnsembleSpec(Kind.ELLIPSE, 512, axis_a=a, axis_b=b)
    results = []
    for t in range(4):
        x = sample(spec, RngStream(SEED, t))
        results.append(profile_in_star(support_profile(x), body, slack=tol.ELLIPSE_SLACK))
    report(9, all(results), f"{sum(results)}/4 trials inside K(R) with slack {tol.ELLIPSE_SLACK}")


def test_criterion_10_normal_identity():
    worst = 0.0
    rng = np.random.default_rng(SEED)
    for t in range(50):
        n = int(rng.integers(1, 65))
        x = random_normal_matrix(n, RngStream(SEED, t))
        poly = adaptive_range(x).inner
        worst = max(worst, hausdorff_polygons(poly, spectrum_hull(x)) / operator_norm(x))
    report(10, worst <= tol.NORMAL_IDENTITY_REL,
           f"max d_H(W-polygon, hull)/||X|| = {worst:.2e} (<= {tol.NORMAL_IDENTITY_REL:g}) over 50 matrices")


def test_criterion_11_brute_force():
    rng = np.random.default_rng(SEED)
    thetas = grid(32)
    lowest = np.inf
    worst = 0.0
    for t in range(20):
        n = 1 + t % 6
        x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        p = support_profile(x, 32)
        best = brute_force_support(x, thetas, 10 ** 5, rng)
        lowest = min(lowest, float((p.lambdas - best).min()))
        worst = max(worst, float((p.lambdas - best).max()))
    ok = lowest >= -1e-12 and worst < tol.BRUTE_FORCE_EXCESS
    report(11, ok, f"support - best sample in [{lowest:.1e}, {worst:.1e}] (>= 0, < {tol.BRUTE_FORCE_EXCESS:g})")


CLI_RUNS = [
    ["gen", "--ensemble", "triangular-block", "--k", 4, "--n", 32],
    ["range", "--ensemble", "ginibre-complex", "--n", 64, "--target-radius", SQRT2],
    ["sweep", "--ensemble", "triangular-strict", "--n", "16,32", "--trials", 4, "--m", 64,
     "--target-radius", SQRT2],
    ["tail", "--ensemble", "ginibre-complex", "--n", 32, "--trials", 8, "--statistic", "re_part_norm_deviation"],
    ["norms", "--n", "32,64", "--k", "4,16", "--trials", 4],
    ["moments", "--n", 64, "--trials", 4],
]


def test_criterion_12_cli_determinism(tmp_path):
    mismatched, files = [], 0
    for i, argv in enumerate(CLI_RUNS):
        dirs = [tmp_path / f"{i}-{threads}" for threads in (1, 4)]
        for d, threads in zip(dirs, (1, 4)):
            rc = cli.main([str(a) for a in argv] + ["--seed", "11", "--threads", str(threads), "--out", str(d)])
            if rc != 0:
                mismatched.append(f"{argv[0]} exit {rc}")
        for f in sorted(dirs[0].iterdir()):
            files += 1
            other = dirs[1] / f.name
            if not other.exists() or other.read_bytes() != f.read_bytes():
                mismatched.append(f"{argv[0]}/{f.name}")
    report(12, not mismatched, f"{files} output files from 6 commands byte-identical at --threads 1 vs 4"
           if not mismatched else f"differences: {mismatched}")
