"""Scalar diagnostics of a single matrix."""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from typing import Optional

import numpy as np

from . import numrange
from .errors import DegenerateRange
from .linalg import as_matrix, eigenvalues_general, gram, hs_norm, matmul, operator_norm
from .formats import dumps_json, fmt

log = logging.getLogger(__name__)


@dataclass
class MetricsReport:
    n: int
    operator_norm: float
    numerical_radius: float
    spectral_radius: float
    mu3: float
    mu3_squared_over_n: float
    alpha: float
    hs_norm: float
    area_ratio: Optional[float] = None
    target_radius: Optional[float] = None
    hausdorff_to_target: Optional[float] = None
    hausdorff_certified: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return dumps_json(self.to_dict())

    @classmethod
    def csv_header(cls) -> str:
        return ",".join(f.name for f in fields(cls))

    def csv_row(self) -> str:
        return ",".join(_csv_cell(getattr(self, f.name)) for f in fields(self))


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return fmt(v)
    return str(v)


def mu3(x, spectrum: Optional[np.ndarray] = None) -> float:
    """Non-normality (||X||_HS^2 - sum |lambda_i|^2)^{1/2}, clamped at zero."""
    x = as_matrix(x)
    if spectrum is None:
        spectrum = eigenvalues_general(x)
    diff = hs_norm(x) ** 2 - float(np.sum(np.abs(spectrum) ** 2))
    return math.sqrt(max(diff, 0.0))


def is_traceless(x) -> bool:
    x = as_matrix(x)
    return abs(np.trace(x)) <= 1e-8 * x.shape[0] * max(operator_norm(x), 1e-300)


def alpha_scaling(x) -> float:
    """sqrt((Tr XX* + |Tr X^2|) / 2); the formula assumes a traceless X."""
    x = as_matrix(x)
    tr_xx = float(np.vdot(x, x).real)
    tr_x2 = complex(np.sum(x * x.T))
    if abs(np.trace(x)) > 1e-8 * x.shape[0] * max(math.sqrt(tr_xx), 1e-300):
        log.debug("alpha_scaling: matrix is not traceless (|Tr X| = %g)", abs(np.trace(x)))
    return math.sqrt(0.5 * (tr_xx + abs(tr_x2)))


def normalized_moment(x, ell: int) -> float:
    """N^{-1} Tr((X X*)^ell) by repeated multiplication."""
    return normalized_moments(x, ell)[-1]


def normalized_moments(x, lmax: int) -> list[float]:
    """[N^{-1} Tr((XX*)^l) for l = 1..lmax]."""
    if lmax < 1:
        raise ValueError("moment order must be >= 1")
    x = as_matrix(x)
    n = x.shape[0]
    p = gram(x)
    power = p
    out = [float(np.trace(power).real) / n]
    for _ in range(lmax - 1):
        power = matmul(power, p)
        out.append(float(np.trace(power).real) / n)
    return out


def moment_limit(ell: int) -> Fraction:
    """l^l / (l+1)!, the large-N limit of E N^{-1} Tr((T-bar T-bar*)^l)."""
    return Fraction(ell ** ell, math.factorial(ell + 1))


def metrics_report(x, m: int = numrange.DEFAULT_GRID, target_radius: Optional[float] = None,
                   profile: Optional[numrange.SupportProfile] = None, threads: int = 1) -> MetricsReport:
    x = as_matrix(x)
    n = x.shape[0]
    if profile is None:
        profile = numrange.support_profile(x, m, threads=threads)
    spectrum = eigenvalues_general(x)
    hs = hs_norm(x)
    m3 = mu3(x, spectrum)
    try:
        ratio = numrange.area_ratio(x, profile=profile, spectrum=spectrum)
    except DegenerateRange:
        ratio = None
    report = MetricsReport(
        n=n,
        operator_norm=operator_norm(x),
        numerical_radius=numrange.numerical_radius(profile),
        spectral_radius=float(np.abs(spectrum).max()),
        mu3=m3,
        mu3_squared_over_n=m3 * m3 / n,
        alpha=alpha_scaling(x),
        hs_norm=hs,
        area_ratio=ratio,
    )
    if target_radius is not None:
        dist = numrange.hausdorff_to_disk(profile, target_radius)
        report.target_radius = float(target_radius)
        report.hausdorff_to_target = dist.raw
        report.hausdorff_certified = dist.certified
    return report
