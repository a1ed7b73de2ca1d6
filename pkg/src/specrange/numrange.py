"""Numerical range through its support function.

For a direction theta the support value of W(X) is the top eigenvalue of
Re(e^{i theta} X), and the top eigenvector y gives the boundary point
(Xy, y).  Sampling m directions yields an inner polygon (hull of boundary
points) and an outer polygon (intersection of the m supporting halfplanes
{z : Re(e^{i theta_j} z) <= lambda_j}).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import DegenerateRange, GridMismatch
from .linalg import as_matrix, eigenvalues_general, extreme_eigenpairs, hermitian_part
from .formats import SCHEMA_LINE, fmt

DEFAULT_GRID = 256
HULL_TOL = 1e-12


@dataclass
class SupportProfile:
    m: int
    thetas: np.ndarray
    lambdas: np.ndarray  # support values lambda_max(Re(e^{i theta_j} X))
    norms: np.ndarray  # ||Re(e^{i theta_j} X)||
    boundary: np.ndarray  # complex boundary points (X y_j, y_j)


@dataclass
class ConvexPolygon:
    """Counterclockwise vertices; one vertex is a point, two a segment."""

    vertices: np.ndarray

    @property
    def is_degenerate(self) -> bool:
        return len(self.vertices) < 3


class RangePolygons(NamedTuple):
    inner: ConvexPolygon
    outer: ConvexPolygon
    gap: float  # Hausdorff distance between inner and outer


class DiskDistance(NamedTuple):
    raw: float  # max_j |lambda_j - R| over the grid
    certified: float  # rigorous upper bound on d_H(W(X), D(0, R))


@dataclass
class StarBody:
    """Star-shaped body {s e^{-i theta} R(theta) : s in [0, 1]}.

    ``radial`` samples R on the grid theta_j = 2 pi j / m; values between nodes
    are linearly interpolated, periodically.
    """

    radial: np.ndarray

    def __post_init__(self):
        self.radial = np.asarray(self.radial, dtype=float)
        if self.radial.ndim != 1 or len(self.radial) < 2:
            raise ValueError("radial function needs at least two samples")
        if not np.all(np.isfinite(self.radial)) or np.any(self.radial < 0):
            raise ValueError("radial values must be finite and nonnegative")

    @property
    def m(self) -> int:
        return len(self.radial)

    @classmethod
    def from_function(cls, f: Callable[[np.ndarray], np.ndarray], m: int = DEFAULT_GRID) -> "StarBody":
        return cls(np.asarray(f(grid(m)), dtype=float))

    @classmethod
    def from_norms(cls, profile: SupportProfile) -> "StarBody":
        """K(R) with R(theta) = ||Re(e^{i theta} X)||, which contains W(X)."""
        return cls(profile.norms.copy())

    def radius_at(self, theta) -> np.ndarray:
        m = self.m
        t = np.mod(np.asarray(theta, dtype=float), 2 * np.pi) * (m / (2 * np.pi))
        i0 = np.floor(t).astype(int) % m
        frac = t - np.floor(t)
        return (1 - frac) * self.radial[i0] + frac * self.radial[(i0 + 1) % m]


def grid(m: int) -> np.ndarray:
    return 2 * np.pi * np.arange(m) / m


# ---------------------------------------------------------------------------
# support function
# ---------------------------------------------------------------------------

def support_profile(x, m: int = DEFAULT_GRID, method: str = "lapack", threads: int = 1) -> SupportProfile:
    """Sample the support function of W(X) on m equally spaced directions.

    Directions theta and theta + pi share one eigensolve, since
    Re(e^{i(theta+pi)} X) = -Re(e^{i theta} X).
    """
    x = as_matrix(x)
    if m < 8 or m % 2:
        raise ValueError("grid size must be even and at least 8")
    half = m // 2
    thetas = grid(m)
    lambdas = np.empty(m)
    boundary = np.empty(m, dtype=np.complex128)

    def solve(j):
        pairs = extreme_eigenpairs(hermitian_part(x, thetas[j]), method=method)
        hi, lo = pairs.hi_vector, pairs.lo_vector
        lambdas[j] = pairs.hi_value
        lambdas[j + half] = -pairs.lo_value
        boundary[j] = np.vdot(hi, x @ hi)
        boundary[j + half] = np.vdot(lo, x @ lo)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(solve, range(half)))
    else:
        for j in range(half):
            solve(j)
    norms = np.maximum(lambdas, np.roll(lambdas, half))
    return SupportProfile(m, thetas, lambdas, norms, boundary)


def norm_profile(x, m: int = DEFAULT_GRID, method: str = "lapack", threads: int = 1) -> np.ndarray:
    return support_profile(x, m, method=method, threads=threads).norms


def support_of_points(points, thetas) -> np.ndarray:
    """Support function of conv(points): max_p Re(e^{i theta} p)."""
    points = np.asarray(points, dtype=np.complex128).ravel()
    phases = np.exp(1j * np.asarray(thetas, dtype=float))
    return (np.outer(phases, points)).real.max(axis=1)


# ---------------------------------------------------------------------------
# planar convex geometry
# ---------------------------------------------------------------------------

def _cross(o, a, b):
    return (a.real - o.real) * (b.imag - o.imag) - (a.imag - o.imag) * (b.real - o.real)


def convex_hull(points, tol: float = HULL_TOL) -> ConvexPolygon:
    """Andrew's monotone chain; drops duplicates and collinear points."""
    pts = np.asarray(points, dtype=np.complex128).ravel()
    if pts.size == 0:
        raise ValueError("no points")
    scale = max(float(np.abs(pts).max()), 1.0)
    eps = tol * scale
    order = np.lexsort((pts.imag, pts.real))
    uniq = []
    for p in pts[order]:
        if not uniq or abs(p - uniq[-1]) > eps:
            uniq.append(p)
    if len(uniq) <= 2:
        if len(uniq) == 2 and abs(uniq[1] - uniq[0]) <= eps:
            uniq = uniq[:1]
        return ConvexPolygon(np.array(uniq, dtype=np.complex128))
    area_eps = eps * scale

    def chain(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= area_eps:
                out.pop()
            out.append(p)
        return out

    lower = chain(uniq)
    upper = chain(reversed(uniq))
    hull = lower[:-1] + upper[:-1]
    return ConvexPolygon(np.array(hull, dtype=np.complex128))


def polygon_area(poly: ConvexPolygon) -> float:
    """Shoelace formula; zero for degenerate polygons."""
    v = poly.vertices
    if len(v) < 3:
        return 0.0
    x, y = v.real, v.imag
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def _edges(poly: ConvexPolygon):
    v = poly.vertices
    if len(v) == 1:
        return v, v
    if len(v) == 2:
        return v, v[::-1]
    return v, np.roll(v, -1)


def _segment_distance(z: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distances from points z (k,) to segments [a, b] (e,) as a (k, e) array."""
    z = z[:, None]
    ab = b - a
    denom = np.abs(ab) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        t = ((z - a) * np.conj(ab)).real / denom
    t = np.where(denom > 0, np.clip(t, 0.0, 1.0), 0.0)
    return np.abs(z - (a + t * ab))


def contains(poly: ConvexPolygon, z, tol: float = 1e-12) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    if poly.is_degenerate:
        return point_distance(poly, z) <= tol
    a, b = _edges(poly)
    cr = _cross(a[None, :], b[None, :], z[:, None])
    return np.all(cr >= -tol * max(1.0, float(np.abs(poly.vertices).max())), axis=1)


def point_distance(poly: ConvexPolygon, z) -> np.ndarray:
    """Euclidean distance from each point to the (filled) polygon."""
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    a, b = _edges(poly)
    d = _segment_distance(z, a, b).min(axis=1)
    if not poly.is_degenerate:
        d = np.where(contains(poly, z, tol=0.0), 0.0, d)
    return d


def hausdorff_polygons(p: ConvexPolygon, q: ConvexPolygon) -> float:
    """Exact Hausdorff distance; the farthest point of a polygon from a convex
    set is always one of its vertices."""
    return float(max(point_distance(q, p.vertices).max(), point_distance(p, q.vertices).max()))


def max_support(poly: ConvexPolygon) -> float:
    return float(np.abs(poly.vertices).max())


def min_support(poly: ConvexPolygon) -> float:
    """min over theta of the support function of the polygon."""
    v = poly.vertices
    if len(v) >= 3 and contains(poly, 0.0, tol=0.0)[0]:
        a, b = _edges(poly)
        normal = -1j * (b - a) / np.abs(b - a)
        return float(np.min((a * np.conj(normal)).real))
    return -float(point_distance(poly, 0.0)[0])


def hausdorff_polygon_disk(poly: ConvexPolygon, radius: float) -> float:
    return max(max_support(poly) - radius, radius - min_support(poly))


# ---------------------------------------------------------------------------
# profile-level operations
# ---------------------------------------------------------------------------

def _outer_vertices(profile: SupportProfile) -> np.ndarray:
    t0, t1 = profile.thetas, np.roll(profile.thetas, -1)
    l0, l1 = profile.lambdas, np.roll(profile.lambdas, -1)
    # x cos t - y sin t = lambda for two consecutive directions
    det = np.sin(t0 - t1)
    x = (-l0 * np.sin(t1) + l1 * np.sin(t0)) / det
    y = (np.cos(t0) * l1 - np.cos(t1) * l0) / det
    return x + 1j * y


def inner_outer_range(profile: SupportProfile) -> RangePolygons:
    """Inner (hull of boundary points) and outer (halfplane intersection)
    polygons.  Degenerate ranges give degenerate polygons, never an error."""
    inner = convex_hull(profile.boundary)
    outer = convex_hull(_outer_vertices(profile))
    return RangePolygons(inner, outer, hausdorff_polygons(inner, outer))


def _support_point(x: np.ndarray, theta: float, method: str) -> tuple[float, complex]:
    pairs = extreme_eigenpairs(hermitian_part(x, theta), method=method)
    y = pairs.hi_vector
    return pairs.hi_value, complex(np.vdot(y, x @ y))


def _wedge_gap(t0, l0, p0, t1, l1, p1) -> float:
    """Distance from the corner of two support lines to the chord [p0, p1]."""
    det = math.sin(t0 - t1)
    if abs(det) < 1e-15:
        return 0.0
    v = complex((-l0 * math.sin(t1) + l1 * math.sin(t0)) / det,
                (math.cos(t0) * l1 - math.cos(t1) * l0) / det)
    return float(_segment_distance(np.array([v]), np.array([p0]), np.array([p1]))[0, 0])


def _split_direction(t0, p0, t1, p1) -> float:
    """Outward normal of the chord if it falls inside (t0, t1), else the midpoint.

    On the chord normal both endpoints have equal support, so a true edge of
    W is confirmed by one extra eigensolve.
    """
    d = p1 - p0
    if d != 0:
        psi = math.atan2(d.imag, d.real)
        for cand in (math.pi / 2 - psi, -math.pi / 2 - psi):
            k = math.ceil((t0 - cand) / (2 * math.pi))
            c = cand + 2 * math.pi * k
            if t0 < c < t1 and min(c - t0, t1 - c) > 1e-9 * (t1 - t0):
                return c
    return 0.5 * (t0 + t1)


def adaptive_range(x, m: int = DEFAULT_GRID, tol: float = 1e-10, max_directions: int = 200_000,
                   method: str = "lapack", profile: Optional[SupportProfile] = None) -> RangePolygons:
    """Inner/outer polygons refined until every wedge gap is below ``tol``.

    Starts from the uniform profile and subdivides any pair of neighbouring
    directions whose support-line corner lies farther than ``tol`` from the
    chord of their boundary points.  Polygonal ranges (normal matrices) are
    recovered exactly, including vertices whose normal cone is narrower than
    the uniform grid spacing.  Refinement stops once ``max_directions``
    directions are in use; on a smooth boundary the gap falls like the square
    of the direction spacing.
    """
    x = as_matrix(x)
    if profile is None:
        profile = support_profile(x, m, method=method)
    nodes = list(zip(profile.thetas.tolist(), profile.lambdas.tolist(), profile.boundary.tolist()))
    budget = max_directions - len(nodes)
    # breadth-first passes, widest wedges first, so a capped budget still shrinks the worst gap
    while budget > 0:
        t_first, l_first, p_first = nodes[0]
        ext = nodes + [(t_first + 2 * math.pi, l_first, p_first)]
        wide = []
        for i in range(len(nodes)):
            a, b = ext[i], ext[i + 1]
            if b[0] - a[0] > 1e-12:
                g = _wedge_gap(*a, *b)
                if g > tol:
                    wide.append((g, i))
        if not wide:
            break
        wide.sort(key=lambda w: -w[0])
        added = {}
        for _, i in wide[:budget]:
            t = _split_direction(ext[i][0], ext[i][2], ext[i + 1][0], ext[i + 1][2])
            added[i] = (t, *_support_point(x, t, method))
        budget -= len(added)
        merged = []
        for i, node in enumerate(nodes):
            merged.append(node)
            if i in added:
                merged.append(added[i])
        nodes = merged
    out = nodes
    t = np.array([n[0] for n in out])
    lam = np.array([n[1] for n in out])
    pts = np.array([n[2] for n in out])
    inner = convex_hull(pts)
    det = np.sin(t - np.roll(t, -1))
    ok = np.abs(det) > 1e-15
    t0, t1, l0, l1 = t[ok], np.roll(t, -1)[ok], lam[ok], np.roll(lam, -1)[ok]
    corners = ((-l0 * np.sin(t1) + l1 * np.sin(t0)) + 1j * (np.cos(t0) * l1 - np.cos(t1) * l0)) / det[ok]
    outer = convex_hull(np.concatenate([corners, pts])) if corners.size else inner
    return RangePolygons(inner, outer, hausdorff_polygons(inner, outer))


def hausdorff_to_disk(profile: SupportProfile, radius: float) -> DiskDistance:
    """Hausdorff distance between W(X) and the disk D(0, radius).

    For convex compacta d_H is the sup-norm distance of the support functions;
    the disk's support function is the constant ``radius``.  Because
    inner <= W <= outer, the larger polygon-to-disk distance bounds d_H.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    raw = float(np.max(np.abs(profile.lambdas - radius)))
    polys = inner_outer_range(profile)
    certified = max(raw, hausdorff_polygon_disk(polys.inner, radius),
                    hausdorff_polygon_disk(polys.outer, radius))
    return DiskDistance(raw, certified)


def hausdorff_convex(p: SupportProfile, q: SupportProfile) -> float:
    if p.m != q.m or not np.array_equal(p.thetas, q.thetas):
        raise GridMismatch(f"profiles sampled on different grids ({p.m} vs {q.m})")
    return float(np.max(np.abs(p.lambdas - q.lambdas)))


def numerical_radius(profile: SupportProfile) -> float:
    return float(np.max(profile.lambdas))


def numerical_radius_bracket(profile: SupportProfile) -> tuple[float, float]:
    """Lower and upper bounds on r(X) from the boundary points and outer polygon."""
    lo = max(float(np.max(profile.lambdas)), float(np.abs(profile.boundary).max()))
    hi = max(lo, float(np.abs(_outer_vertices(profile)).max()))
    return lo, hi


def spectrum_hull(x=None, spectrum=None) -> ConvexPolygon:
    if spectrum is None:
        spectrum = eigenvalues_general(x)
    return convex_hull(spectrum)


def area_ratio(x, m: int = DEFAULT_GRID, profile: Optional[SupportProfile] = None,
               spectrum: Optional[np.ndarray] = None) -> float:
    """area(W(X)) / area(conv(spectrum)), with W approximated by the inner polygon."""
    x = as_matrix(x)
    if profile is None:
        profile = support_profile(x, m)
    gamma = spectrum_hull(x, spectrum)
    gamma_area = polygon_area(gamma)
    scale = max(float(np.abs(gamma.vertices).max()), 1e-300)
    if gamma.is_degenerate or gamma_area <= 1e-12 * scale * scale:
        raise DegenerateRange("convex hull of the spectrum has zero area")
    return polygon_area(convex_hull(profile.boundary)) / gamma_area


def star_membership(z: complex, body: StarBody, slack: float = 0.0) -> bool:
    """z = rho e^{-i theta} belongs to K(R) iff rho <= R(theta) + slack."""
    rho = abs(z)
    if rho == 0.0:
        return True
    theta = -math.atan2(z.imag, z.real)
    return bool(rho <= float(body.radius_at(theta)) + slack)


def profile_in_star(profile: SupportProfile, body: StarBody, slack: float = 0.0) -> bool:
    z = profile.boundary
    theta = -np.angle(z)
    return bool(np.all(np.abs(z) <= body.radius_at(theta) + slack))


def write_profile_csv(path, profile: SupportProfile) -> None:
    lines = [SCHEMA_LINE, "theta,lambda,norm,boundary_re,boundary_im"]
    for t, lam, nrm, p in zip(profile.thetas, profile.lambdas, profile.norms, profile.boundary):
        lines.append(",".join(fmt(v) for v in (t, lam, nrm, p.real, p.imag)))
    Path(path).write_text("\n".join(lines) + "\n")
