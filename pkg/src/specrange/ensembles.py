"""Seedable random-matrix ensembles.

Random numbers come from :class:`RngStream`.  The generator is NumPy's
``PCG64`` bit generator; its 64-bit seed is derived from ``(master_seed,
stream_index)`` with the SplitMix64 finalizer (:func:`mix64`).  Uniforms are
built from the raw 64-bit outputs as ``((x >> 11) + 0.5) * 2**-53`` and
Gaussians use Box-Muller, so every sampled matrix is a pure function of the
raw PCG64 stream.  NumPy guarantees that stream is stable across releases.
"""
from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidSpec
from .linalg import eigenvalues_general, hermitian_part

MASK64 = (1 << 64) - 1
_TWO_NEG_53 = 2.0 ** -53


def mix64(x: int) -> int:
    """SplitMix64 finalizer: a bijective 64-bit mixing function."""
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class RngStream:
    """Independent random stream keyed by ``(master_seed, stream_index)``."""

    def __init__(self, master_seed: int, stream_index: int = 0):
        self.master_seed = int(master_seed) & MASK64
        self.stream_index = int(stream_index) & MASK64
        self.key = mix64(self.master_seed ^ mix64(self.stream_index))
        self._bitgen = np.random.PCG64(self.key)

    def __repr__(self):
        return f"RngStream(master_seed={self.master_seed}, stream_index={self.stream_index})"

    def child(self, j: int) -> "RngStream":
        """Deterministic sub-stream, independent of this one and of other children."""
        return RngStream(self.key, j)

    def uniforms(self, k: int) -> np.ndarray:
        """k doubles in the open interval (0, 1)."""
        raw = self._bitgen.random_raw(int(k))
        return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO_NEG_53

    def _box_muller(self, pairs: int):
        u = self.uniforms(2 * pairs)
        r = np.sqrt(-2.0 * np.log(u[0::2]))
        phi = 2.0 * np.pi * u[1::2]
        return r * np.cos(phi), r * np.sin(phi)

    def normals(self, k: int) -> np.ndarray:
        """k standard real Gaussians."""
        z0, z1 = self._box_muller((k + 1) // 2)
        out = np.empty(2 * len(z0))
        out[0::2] = z0
        out[1::2] = z1
        return out[:k]

    def complex_normals(self, k: int, variance: float = 1.0) -> np.ndarray:
        """k centered complex Gaussians with E|xi|^2 = variance."""
        z0, z1 = self._box_muller(k)
        return math.sqrt(variance / 2.0) * (z0 + 1j * z1)


def gaussian_complex(stream: RngStream, variance: float) -> complex:
    if variance <= 0:
        raise ValueError("variance must be positive")
    return complex(stream.complex_normals(1, variance)[0])


def max_abs_gaussian_bound(n: int) -> float:
    """sqrt(2 ln(2n)), the bound on E max_i |g_i| for n standard Gaussians."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.sqrt(2.0 * math.log(2.0 * n))


class Kind(str, enum.Enum):
    GINIBRE_COMPLEX = "ginibre-complex"
    GINIBRE_REAL = "ginibre-real"
    TRIANGULAR_STRICT = "triangular-strict"
    TRIANGULAR_BAR = "triangular-bar"
    TRIANGULAR_BLOCK = "triangular-block"
    DIAGONALIZED_GINIBRE = "diagonalized-ginibre"
    DIAGONAL_UNITARY = "diagonal-unitary"
    JORDAN = "jordan"
    MIXTURE = "mixture"
    DIAG_PLUS_TRIANGULAR = "diag-plus-triangular"
    UNITARY_PLUS_TRIANGULAR = "unitary-plus-triangular"
    ELLIPSE = "ellipse"


@dataclass(frozen=True)
class EnsembleSpec:
    """A random-matrix distribution at a fixed dimension.

    Entry variances (E|x|^2):

    ============================  ==========================================
    ginibre-complex               1/n, every entry
    ginibre-real                  1/n, real entries
    triangular-strict (T_N)       2/(n-1) strictly above the diagonal
    triangular-bar (T-bar_N)      1/n strictly above the diagonal
    triangular-block(k)           T-bar_N with the diagonal blocks of width
                                  floor(n/k) zeroed
    diagonalized-ginibre (D_N)    eigenvalues of a ginibre-complex sample
    diagonal-unitary (U_N)        diag(exp(i phi)), phi ~ U[0, 2 pi)
    jordan                        ones on the first superdiagonal
    mixture(base, a)              sqrt(1-a) base + sqrt(a) T_N
    diag-plus-triangular          D_N + T_N / sqrt(2)
    unitary-plus-triangular       U_N + T_N
    ellipse(a, b)                 a H1 + i b H2, H1, H2 Hermitian parts of
                                  independent ginibre-complex samples
    ============================  ==========================================
    """

    kind: Kind
    n: int
    k: Optional[int] = None
    weight: Optional[float] = None
    base: Optional["EnsembleSpec"] = None
    axis_a: Optional[float] = None
    axis_b: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))

    def with_n(self, n: int) -> "EnsembleSpec":
        base = self.base.with_n(n) if self.base is not None else None
        return dataclasses.replace(self, n=n, base=base)

    def validate(self) -> None:
        n = self.n
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise InvalidSpec(f"dimension must be a positive integer, got {n!r}")
        kind = self.kind
        needs_two = {Kind.TRIANGULAR_STRICT, Kind.TRIANGULAR_BAR, Kind.TRIANGULAR_BLOCK,
                     Kind.MIXTURE, Kind.DIAG_PLUS_TRIANGULAR, Kind.UNITARY_PLUS_TRIANGULAR}
        if kind in needs_two and n < 2:
            raise InvalidSpec(f"{kind.value} needs n >= 2")
        if kind is Kind.TRIANGULAR_BLOCK:
            if self.k is None or not 1 <= self.k <= n:
                raise InvalidSpec(f"block count k must satisfy 1 <= k <= n, got k={self.k}, n={n}")
        if kind is Kind.MIXTURE:
            if self.weight is None or not 0.0 <= self.weight <= 1.0:
                raise InvalidSpec("mixture weight must lie in [0, 1]")
            if self.base is None:
                raise InvalidSpec("mixture needs a base ensemble")
            if self.base.n != n:
                raise InvalidSpec("mixture base must have the same dimension")
            self.base.validate()
        if kind is Kind.ELLIPSE:
            if not (self.axis_a and self.axis_a > 0 and self.axis_b and self.axis_b > 0):
                raise InvalidSpec("ellipse needs a > 0 and b > 0")

    def label(self) -> str:
        if self.kind is Kind.TRIANGULAR_BLOCK:
            return f"{self.kind.value}(k={self.k})"
        if self.kind is Kind.MIXTURE:
            return f"mixture({self.base.label()}, a={self.weight!r})"
        if self.kind is Kind.ELLIPSE:
            return f"ellipse(a={self.axis_a!r}, b={self.axis_b!r})"
        return self.kind.value

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value, "n": int(self.n)}
        if self.k is not None:
            out["k"] = int(self.k)
        if self.weight is not None:
            out["weight"] = float(self.weight)
        if self.base is not None:
            out["base"] = self.base.to_dict()
        if self.axis_a is not None:
            out["axis_a"] = float(self.axis_a)
            out["axis_b"] = float(self.axis_b)
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "EnsembleSpec":
        d = dict(d)
        if d.get("base") is not None:
            d["base"] = cls.from_dict(d["base"])
        return cls(**d)


def block_mask(n: int, k: int) -> np.ndarray:
    """Boolean mask of the entries T-bar_{N,k} zeroes (strictly upper part only).

    With m = floor(n/k), entry (i, j) (1-based) is zeroed when
    l*m + 1 <= j <= (l+1)*m and i >= l*m + 1 for some l >= 0.
    """
    m = n // k
    i, j = np.indices((n, n))
    return (j > i) & (i >= (j // m) * m)


def _upper_triangular(stream: RngStream, n: int, variance: float) -> np.ndarray:
    out = np.zeros((n, n), dtype=np.complex128)
    iu = np.triu_indices(n, 1)
    out[iu] = stream.complex_normals(len(iu[0]), variance)
    return out


def sample(spec: EnsembleSpec, stream: RngStream) -> np.ndarray:
    """Draw one matrix from ``spec`` using ``stream``."""
    spec.validate()
    n = int(spec.n)
    kind = spec.kind
    if kind is Kind.GINIBRE_COMPLEX:
        return stream.complex_normals(n * n, 1.0 / n).reshape(n, n)
    if kind is Kind.GINIBRE_REAL:
        return (stream.normals(n * n) * math.sqrt(1.0 / n)).reshape(n, n).astype(np.complex128)
    if kind is Kind.TRIANGULAR_STRICT:
        return _upper_triangular(stream, n, 2.0 / (n - 1))
    if kind is Kind.TRIANGULAR_BAR:
        return _upper_triangular(stream, n, 1.0 / n)
    if kind is Kind.TRIANGULAR_BLOCK:
        t = _upper_triangular(stream, n, 1.0 / n)
        t[block_mask(n, spec.k)] = 0.0
        return t
    if kind is Kind.DIAGONALIZED_GINIBRE:
        g = sample(EnsembleSpec(Kind.GINIBRE_COMPLEX, n), stream)
        return np.diag(eigenvalues_general(g))
    if kind is Kind.DIAGONAL_UNITARY:
        return np.diag(np.exp(2j * np.pi * stream.uniforms(n)))
    if kind is Kind.JORDAN:
        return np.eye(n, k=1, dtype=np.complex128)
    if kind is Kind.MIXTURE:
        x = sample(spec.base, stream.child(0))
        t = sample(EnsembleSpec(Kind.TRIANGULAR_STRICT, n), stream.child(1))
        a = spec.weight
        return math.sqrt(1.0 - a) * x + math.sqrt(a) * t
    if kind is Kind.DIAG_PLUS_TRIANGULAR:
        d = sample(EnsembleSpec(Kind.DIAGONALIZED_GINIBRE, n), stream.child(0))
        t = sample(EnsembleSpec(Kind.TRIANGULAR_STRICT, n), stream.child(1))
        return d + t / math.sqrt(2.0)
    if kind is Kind.UNITARY_PLUS_TRIANGULAR:
        u = sample(EnsembleSpec(Kind.DIAGONAL_UNITARY, n), stream.child(0))
        t = sample(EnsembleSpec(Kind.TRIANGULAR_STRICT, n), stream.child(1))
        return u + t
    if kind is Kind.ELLIPSE:
        g = EnsembleSpec(Kind.GINIBRE_COMPLEX, n)
        h1 = hermitian_part(sample(g, stream.child(0)))
        h2 = hermitian_part(sample(g, stream.child(1)))
        return spec.axis_a * h1 + 1j * spec.axis_b * h2
    raise InvalidSpec(f"unsupported ensemble {kind}")


def haar_unitary(n: int, stream: RngStream) -> np.ndarray:
    """Haar-distributed unitary from the QR factorization of a Ginibre matrix."""
    z = stream.complex_normals(n * n).reshape(n, n)
    q, r = np.linalg.qr(z)
    d = r.diagonal()
    return q * (d / np.abs(d))


def random_normal_matrix(n: int, stream: RngStream) -> np.ndarray:
    """U D U* with Haar U and complex Gaussian diagonal D."""
    u = haar_unitary(n, stream)
    d = stream.complex_normals(n)
    return (u * d) @ u.conj().T
