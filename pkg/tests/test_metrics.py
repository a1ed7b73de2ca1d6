import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from specrange.ensembles import EnsembleSpec, Kind, RngStream, haar_unitary, random_normal_matrix, sample
from specrange.errors import DimensionMismatch
from specrange.linalg import hermitian_eigvalsh, hs_norm, gram
from specrange.metrics import (
    MetricsReport, alpha_scaling, is_traceless, metrics_report, moment_limit, mu3,
    normalized_moment, normalized_moments,
)
from specrange.numrange import inner_outer_range, support_profile

J2 = np.array([[0, 1], [0, 0]], dtype=complex)


def draws(kind, n, trials, seed=3):
    return [sample(EnsembleSpec(kind, n), RngStream(seed, t)) for t in range(trials)]


# ---------------------------------------------------------------- mu3

def test_mu3_examples():
    assert mu3(J2) == pytest.approx(1)
    x = random_normal_matrix(30, RngStream(0, 0))
    assert mu3(x) <= 1e-6 * hs_norm(x)
    assert mu3(np.eye(5)) <= 1e-6 * hs_norm(np.eye(5))


def test_mu3_triangular_mean():
    n = 512
    vals = [mu3(t) ** 2 for t in draws(Kind.TRIANGULAR_STRICT, n, 16)]
    assert abs(np.mean(vals) - n) <= 26


@given(n=st.integers(2, 20), seed=st.integers(0, 2**32))
def test_mu3_unitary_invariance(n, seed):
    s = RngStream(seed, 0)
    x = sample(EnsembleSpec(Kind.GINIBRE_COMPLEX, n), s)
    u = haar_unitary(n, s.child(1))
    assert abs(mu3(u @ x @ u.conj().T) - mu3(x)) <= 1e-6 * hs_norm(x)


# ---------------------------------------------------------------- alpha

def test_alpha_examples():
    assert alpha_scaling(J2) == pytest.approx(1 / math.sqrt(2))
    assert alpha_scaling(np.diag([1.0, -1.0])) == pytest.approx(math.sqrt(2))


def test_alpha_ginibre_mean():
    n = 512
    vals = [alpha_scaling(g) / math.sqrt(n / 2) for g in draws(Kind.GINIBRE_COMPLEX, n, 16)]
    assert abs(np.mean(vals) - 1) <= 0.05


def test_traceless_flag(caplog):
    assert is_traceless(J2)
    assert not is_traceless(np.eye(3))
    with caplog.at_level("DEBUG", logger="specrange.metrics"):
        alpha_scaling(np.eye(3))
    assert "not traceless" in caplog.text


# ---------------------------------------------------------------- moments

def test_moment_limits_exact():
    assert [moment_limit(l) for l in range(1, 6)] == [
        Fraction(1, 2), Fraction(2, 3), Fraction(9, 8), Fraction(32, 15), Fraction(3125, 720)]


def test_first_moment_matches_hs(rng):
    x = rng.standard_normal((40, 40)) + 1j * rng.standard_normal((40, 40))
    assert normalized_moment(x, 1) == pytest.approx(hs_norm(x) ** 2 / 40, rel=1e-10)


def test_first_moment_triangular_bar():
    n = 256
    vals = [normalized_moment(t, 1) for t in draws(Kind.TRIANGULAR_BAR, n, 32)]
    assert abs(np.mean(vals) - 0.498) <= 0.01
    assert (n - 1) / (2 * n) == pytest.approx(0.498, abs=1e-3)


@given(n=st.integers(1, 64), seed=st.integers(0, 2**32))
def test_moments_agree_with_eigenvalue_route(n, seed):
    x = sample(EnsembleSpec(Kind.GINIBRE_COMPLEX, n), RngStream(seed, 0))
    ev = hermitian_eigvalsh(gram(x), "householder-ql")
    via_eig = [float(np.sum(ev ** l)) / n for l in range(1, 6)]
    np.testing.assert_allclose(normalized_moments(x, 5), via_eig, rtol=1e-8)


def test_moments_agree_at_256():
    x = sample(EnsembleSpec(Kind.TRIANGULAR_BAR, 256), RngStream(4, 0))
    ev = hermitian_eigvalsh(gram(x), "householder-ql")
    np.testing.assert_allclose(normalized_moments(x, 5), [np.sum(ev ** l) / 256 for l in range(1, 6)], rtol=1e-8)


def test_moment_order_validation():
    with pytest.raises(ValueError):
        normalized_moment(J2, 0)
    with pytest.raises(DimensionMismatch):
        normalized_moment(np.zeros((2, 3)), 1)


# ---------------------------------------------------------------- report

def test_report_jordan():
    r = metrics_report(J2, m=64, target_radius=0.5)
    assert r.numerical_radius == pytest.approx(0.5, abs=1e-12)
    assert r.operator_norm == pytest.approx(1)
    assert r.spectral_radius == pytest.approx(0, abs=1e-8)
    assert r.area_ratio is None
    assert r.hausdorff_to_target <= 1e-10


@given(n=st.integers(2, 16), seed=st.integers(0, 2**32),
       kind=st.sampled_from([Kind.GINIBRE_COMPLEX, Kind.TRIANGULAR_STRICT, Kind.DIAG_PLUS_TRIANGULAR]))
def test_ordering_chain(n, seed, kind):
    x = sample(EnsembleSpec(kind, n), RngStream(seed, 0))
    m = 64
    r = metrics_report(x, m=m)
    slack = inner_outer_range(support_profile(x, m)).gap + 1e-8 * r.operator_norm
    assert r.spectral_radius <= r.numerical_radius + slack
    assert r.numerical_radius <= r.operator_norm + 1e-8 * r.operator_norm
    assert r.operator_norm <= 2 * (r.numerical_radius + slack)
    assert r.mu3 >= 0


def test_diagonal_ensemble_report():
    d = sample(EnsembleSpec(Kind.DIAGONALIZED_GINIBRE, 1024), RngStream(5, 0))
    r = metrics_report(d, m=64)
    for v in (r.operator_norm, r.numerical_radius, r.spectral_radius):
        assert abs(v - 1) <= 0.1
    assert r.mu3 <= 1e-6 * r.hs_norm
    assert r.area_ratio == pytest.approx(1, abs=0.02)


def test_report_serialization():
    r = metrics_report(sample(EnsembleSpec(Kind.GINIBRE_COMPLEX, 8), RngStream(1, 0)), m=16, target_radius=1.5)
    d = json.loads(r.to_json())
    assert d == r.to_dict()
    assert set(d) == {f for f in MetricsReport.__dataclass_fields__}
    header = MetricsReport.csv_header().split(",")
    row = r.csv_row().split(",")
    assert len(header) == len(row)
    assert float(row[header.index("operator_norm")]) == r.operator_norm
    assert '"operator_norm": ' + repr(r.operator_norm)[:10] in r.to_json()
    bare = MetricsReport(1, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0)
    assert bare.csv_row().endswith(",,,,")
    assert json.loads(bare.to_json())["area_ratio"] is None
