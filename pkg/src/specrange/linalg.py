"""Dense complex linear algebra.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.  Two
backends are available for the eigenproblems:

``"householder-ql"`` / ``"hessenberg-qr"``
    Implemented here: Householder reduction to real tridiagonal form followed
    by implicit QL with Wilkinson shifts (Hermitian case), and Householder
    reduction to Hessenberg form followed by single-shift QR with deflation
    (general case).  These are the reference implementations and are used to
    cross-check the fast path.

``"lapack"``
    The same algorithm families as shipped by LAPACK (``zhetrd``/``dstebz``/
    ``dstein``, ``zheevd``, ``zgeev``).  This is the default because Monte
    Carlo runs at N >= 1024 need hundreds of solves per matrix.
"""
from __future__ import annotations

import cmath
import math
from typing import NamedTuple

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from .errors import DimensionMismatch, NonConvergence

HERMITIAN_METHODS = ("lapack", "householder-ql")
GENERAL_METHODS = ("lapack", "hessenberg-qr")

MAX_QL_SWEEPS = 50
QR_SWEEPS_PER_DIM = 40
QR_DEFLATION_TOL = 1e-12

_EPS = np.finfo(float).eps


class HermitianEigenDecomposition(NamedTuple):
    values: np.ndarray  # ascending, real
    vectors: np.ndarray  # columns are unit eigenvectors


class ExtremePairs(NamedTuple):
    """Smallest and largest eigenpairs of a Hermitian matrix."""

    lo_value: float
    lo_vector: np.ndarray
    hi_value: float
    hi_vector: np.ndarray


def as_matrix(x) -> np.ndarray:
    """Validate and convert ``x`` to a square, finite complex128 array."""
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise DimensionMismatch("matrix dimension must be at least 1")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def unit_phase(theta: float) -> complex:
    """e^{i theta}, reduced so that unit_phase(t + pi) == -unit_phase(t).

    The identity is bit-exact whenever ``(t + pi) - pi`` rounds back to ``t``.
    """
    r = math.fmod(theta, 2 * math.pi)
    if r < 0:
        r += 2 * math.pi
    if r >= math.pi:
        return -cmath.exp(1j * (r - math.pi))
    return cmath.exp(1j * r)


def hermitian_part(x: np.ndarray, theta: float = 0.0) -> np.ndarray:
    """Return Re(e^{i theta} X) = (e^{i theta} X + e^{-i theta} X*) / 2."""
    x = np.asarray(x, dtype=np.complex128)
    c = unit_phase(theta)
    y = c * x
    h = 0.5 * (y + y.conj().T)
    # exact Hermitian symmetry: the upper triangle is mirrored from the lower
    iu = np.triu_indices(h.shape[0], 1)
    h[iu] = h.T[iu].conj()
    np.fill_diagonal(h, h.diagonal().real)
    return h


def _symmetrize(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=np.complex128)
    return 0.5 * (h + h.conj().T)


# ---------------------------------------------------------------------------
# Hermitian eigenproblem: in-repo Householder + implicit QL
# ---------------------------------------------------------------------------

def _householder_vector(x: np.ndarray):
    """Unit v and alpha with (I - 2vv*) x = alpha e_1, or (None, x[0])."""
    norm_x = np.linalg.norm(x)
    if norm_x == 0.0:
        return None, 0.0
    x0 = x[0]
    phase = x0 / abs(x0) if x0 != 0 else 1.0
    alpha = -phase * norm_x
    v = x.copy()
    v[0] -= alpha
    norm_v = np.linalg.norm(v)
    if norm_v == 0.0:
        return None, x0
    return v / norm_v, alpha


def householder_tridiagonal(h: np.ndarray):
    """Reduce Hermitian ``h`` to real symmetric tridiagonal form.

    Returns ``(d, e, q)`` with ``h = q @ T @ q.conj().T`` where ``T`` has
    diagonal ``d`` and off-diagonal ``e`` (both real, ``e >= 0``).
    """
    a = np.array(h, dtype=np.complex128)
    n = a.shape[0]
    q = np.eye(n, dtype=np.complex128)
    for k in range(n - 2):
        v, alpha = _householder_vector(a[k + 1:, k])
        if v is None:
            continue
        sub = a[k + 1:, k + 1:]
        p = sub @ v
        c = np.vdot(v, p).real
        w = p - c * v
        sub -= 2.0 * (np.outer(v, w.conj()) + np.outer(w, v.conj()))
        a[k + 1:, k] = 0.0
        a[k, k + 1:] = 0.0
        a[k + 1, k] = alpha
        a[k, k + 1] = np.conj(alpha)
        q[:, k + 1:] -= 2.0 * np.outer(q[:, k + 1:] @ v, v.conj())

    d = a.diagonal().real.copy()
    beta = np.array([a[k + 1, k] for k in range(n - 1)], dtype=np.complex128)
    e = np.abs(beta)
    # diagonal unitary similarity making the off-diagonal real and nonnegative
    delta = np.ones(n, dtype=np.complex128)
    for k in range(n - 1):
        ph = beta[k] / e[k] if e[k] != 0 else 1.0
        delta[k + 1] = delta[k] * ph
    return d, e, q * delta


def tridiagonal_ql(d, e, vectors: bool = True, max_sweeps: int = MAX_QL_SWEEPS):
    """Implicit QL with Wilkinson shifts on a real symmetric tridiagonal.

    Returns ``(values, z)`` in the solver's native order (not sorted); the
    columns of the real orthogonal ``z`` are the eigenvectors of T.
    """
    d = [float(x) for x in d]
    n = len(d)
    e = [float(x) for x in e] + [0.0]
    zt = np.eye(n) if vectors else None  # rows are eigenvectors
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_sweeps:
                raise NonConvergence(f"QL failed to isolate eigenvalue {l}", it)
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if zt is not None:
                    zi = zt[i].copy()
                    zt[i] = c * zi - s * zt[i + 1]
                    zt[i + 1] = s * zi + c * zt[i + 1]
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    z = zt.T if zt is not None else None
    return np.array(d), z


def hermitian_eigh(h: np.ndarray, method: str = "lapack") -> HermitianEigenDecomposition:
    """Full eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    h = _symmetrize(as_matrix(h))
    if method == "lapack":
        values, vectors = np.linalg.eigh(h)
        return HermitianEigenDecomposition(values, vectors)
    if method != "householder-ql":
        raise ValueError(f"unknown method {method!r}")
    n = h.shape[0]
    if n == 1:
        return HermitianEigenDecomposition(h.diagonal().real.copy(), np.eye(1, dtype=np.complex128))
    d, e, q = householder_tridiagonal(h)
    values, z = tridiagonal_ql(d, e)
    order = np.argsort(values, kind="stable")
    return HermitianEigenDecomposition(values[order], q @ z[:, order])


def hermitian_eigvalsh(h: np.ndarray, method: str = "lapack") -> np.ndarray:
    h = _symmetrize(as_matrix(h))
    if method == "lapack":
        return np.linalg.eigvalsh(h)
    if method != "householder-ql":
        raise ValueError(f"unknown method {method!r}")
    if h.shape[0] == 1:
        return h.diagonal().real.copy()
    d, e, _ = householder_tridiagonal(h)
    values, _ = tridiagonal_ql(d, e, vectors=False)
    return np.sort(values)


def _lapack_extremes(h: np.ndarray) -> ExtremePairs:
    n = h.shape[0]
    lwork, info = lapack.zhetrd_lwork(n, lower=1)
    c, d, e, tau, info = lapack.zhetrd(h, lower=1, lwork=max(int(lwork.real), 1))
    if info != 0:
        raise NonConvergence(f"zhetrd returned info={info}", 0)
    found = []
    for idx in (1, n):
        m, w, iblock, isplit, info = lapack.dstebz(d, e, 2, 0.0, 0.0, idx, idx, 0.0, b"B")
        if info != 0 or m != 1:
            raise NonConvergence(f"dstebz returned info={info}", 0)
        found.append((int(iblock[0]), float(w[0])))
    order = sorted(range(2), key=lambda j: found[j])
    w = np.array([found[j][1] for j in order])
    blocks = np.zeros(n, dtype=np.int32)
    blocks[:2] = [found[j][0] for j in order]
    z, info = lapack.dstein(d, e, w, blocks, isplit)
    if info != 0:
        raise NonConvergence(f"dstein returned info={info}", info)
    z = z[:, :2].astype(np.complex128)
    # apply Q = H(0) H(1) ... H(n-2) from zhetrd
    for i in range(n - 2, -1, -1):
        if tau[i] == 0:
            continue
        v = np.empty(n - i - 1, dtype=np.complex128)
        v[0] = 1.0
        v[1:] = c[i + 2:, i]
        z[i + 1:] -= tau[i] * np.outer(v, v.conj() @ z[i + 1:])
    pairs = {order[0]: z[:, 0], order[1]: z[:, 1]}
    lo, hi = pairs[0], pairs[1]
    return ExtremePairs(found[0][1], lo / np.linalg.norm(lo), found[1][1], hi / np.linalg.norm(hi))


def extreme_eigenpairs(h: np.ndarray, method: str = "lapack") -> ExtremePairs:
    """Smallest and largest eigenvalue of Hermitian ``h`` with eigenvectors.

    Among equal eigenvalues the vector returned last by the solver is used.
    """
    h = _symmetrize(as_matrix(h))
    n = h.shape[0]
    if n == 1:
        one = np.ones(1, dtype=np.complex128)
        return ExtremePairs(float(h[0, 0].real), one, float(h[0, 0].real), one.copy())
    if method == "lapack":
        return _lapack_extremes(h)
    values, vectors = hermitian_eigh(h, method=method)
    return ExtremePairs(float(values[0]), vectors[:, 0], float(values[-1]), vectors[:, -1])


def largest_eigenvalue(h: np.ndarray, method: str = "lapack") -> float:
    h = _symmetrize(as_matrix(h))
    n = h.shape[0]
    if method == "lapack":
        return float(scipy.linalg.eigh(h, eigvals_only=True, subset_by_index=[n - 1, n - 1])[0])
    return float(hermitian_eigvalsh(h, method=method)[-1])


# ---------------------------------------------------------------------------
# General eigenvalues: in-repo Hessenberg + shifted QR
# ---------------------------------------------------------------------------

def hessenberg(x: np.ndarray) -> np.ndarray:
    """Unitarily similar upper Hessenberg form via Householder reflectors."""
    a = np.array(x, dtype=np.complex128)
    n = a.shape[0]
    for k in range(n - 2):
        v, alpha = _householder_vector(a[k + 1:, k])
        if v is None:
            continue
        a[k + 1:, k:] -= 2.0 * np.outer(v, v.conj() @ a[k + 1:, k:])
        a[:, k + 1:] -= 2.0 * np.outer(a[:, k + 1:] @ v, v.conj())
        a[k + 2:, k] = 0.0
        a[k + 1, k] = alpha
    return a


def _eig2(a, b, c, d):
    """Eigenvalues of [[a, b], [c, d]]."""
    half_tr = 0.5 * (a + d)
    disc = cmath.sqrt(0.25 * (a - d) ** 2 + b * c)
    return half_tr + disc, half_tr - disc


def _wilkinson_shift(w: np.ndarray) -> complex:
    a, b, c, d = w[-2, -2], w[-2, -1], w[-1, -2], w[-1, -1]
    l1, l2 = _eig2(a, b, c, d)
    return l1 if abs(l1 - d) <= abs(l2 - d) else l2


def _qr_step(w: np.ndarray, mu: complex) -> None:
    """One shifted QR step H - mu = QR, H <- RQ + mu, in place, via Givens."""
    k = w.shape[0]
    idx = np.arange(k)
    w[idx, idx] -= mu
    rots = []
    for j in range(k - 1):
        a, b = w[j, j], w[j + 1, j]
        r = math.hypot(abs(a), abs(b))
        if r == 0.0:
            g = np.eye(2, dtype=np.complex128)
        else:
            g = np.array([[np.conj(a) / r, np.conj(b) / r], [-b / r, a / r]])
        w[j:j + 2, j:] = g @ w[j:j + 2, j:]
        w[j + 1, j] = 0.0
        rots.append(g)
    for j, g in enumerate(rots):
        top = min(j + 2, k - 1)
        w[:top + 1, j:j + 2] = w[:top + 1, j:j + 2] @ g.conj().T
    w[idx, idx] += mu


def hessenberg_qr_eigenvalues(x: np.ndarray, tol: float = QR_DEFLATION_TOL) -> np.ndarray:
    h = hessenberg(x)
    n = h.shape[0]
    eig = np.empty(n, dtype=np.complex128)
    norm = max(np.abs(h).max(), np.finfo(float).tiny)
    hi = n - 1
    total = 0
    its = 0
    while hi >= 0:
        if hi == 0:
            eig[0] = h[0, 0]
            break
        l = hi
        while l > 0:
            scale = abs(h[l, l]) + abs(h[l - 1, l - 1])
            if scale == 0.0:
                scale = norm
            if abs(h[l, l - 1]) <= tol * scale:
                h[l, l - 1] = 0.0
                break
            l -= 1
        if l == hi:
            eig[hi] = h[hi, hi]
            hi -= 1
            its = 0
            continue
        if l == hi - 1:
            eig[hi - 1], eig[hi] = _eig2(h[l, l], h[l, hi], h[hi, l], h[hi, hi])
            hi -= 2
            its = 0
            continue
        total += 1
        its += 1
        if total > QR_SWEEPS_PER_DIM * n:
            raise NonConvergence("shifted QR did not converge", total)
        w = h[l:hi + 1, l:hi + 1]
        if its % 10 == 0:
            # exceptional shift breaks cycles
            mu = w[-1, -1] + 0.75 * abs(w[-1, -2]) * cmath.exp(1j * its)
        else:
            mu = _wilkinson_shift(w)
        _qr_step(w, mu)
    return eig


def eigenvalues_general(x: np.ndarray, method: str = "lapack") -> np.ndarray:
    """Eigenvalues of a general complex matrix, sorted by (re, im)."""
    x = as_matrix(x)
    if method == "lapack":
        values = np.linalg.eigvals(x)
    elif method == "hessenberg-qr":
        values = hessenberg_qr_eigenvalues(x)
    else:
        raise ValueError(f"unknown method {method!r}")
    return np.sort_complex(values.astype(np.complex128))


# ---------------------------------------------------------------------------
# Norms and small utilities
# ---------------------------------------------------------------------------

def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def trace(x: np.ndarray) -> complex:
    return complex(np.trace(as_matrix(x)))


def hs_norm(x: np.ndarray) -> float:
    """Hilbert-Schmidt (Frobenius) norm."""
    return float(np.linalg.norm(as_matrix(x), "fro"))


def gram(x: np.ndarray) -> np.ndarray:
    """X X*, exactly Hermitian."""
    x = as_matrix(x)
    return _symmetrize(x @ x.conj().T)


def operator_norm(x: np.ndarray, method: str = "lapack") -> float:
    """Largest singular value, computed as sqrt(lambda_max(X X*))."""
    lam = largest_eigenvalue(gram(x), method=method)
    return math.sqrt(max(lam, 0.0))
