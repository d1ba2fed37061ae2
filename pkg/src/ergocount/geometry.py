"""Split vectors, unimodular bases, the diagonal flow and the shear group.

Vectors of R^d are split as (x, y) with x in R^m and y in R^n, d = m + n.
Lattices are stored as a matrix whose *columns* form a basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularBlockError, ValidationError

DET_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def _check_dims(m: int, n: int) -> None:
    if int(m) != m or int(n) != n or m < 1 or n < 1:
        raise ValidationError(f"block sizes must be positive integers, got m={m}, n={n}")


@dataclass(frozen=True)
class SplitVector:
    coords: np.ndarray
    m: int
    n: int

    def __post_init__(self):
        _check_dims(self.m, self.n)
        coords = _frozen(np.asarray(self.coords, dtype=float).reshape(-1))
        if coords.shape[0] != self.m + self.n:
            raise ValidationError(f"vector has {coords.shape[0]} coordinates, expected m+n={self.m + self.n}")
        object.__setattr__(self, "coords", coords)

    @property
    def d(self) -> int:
        return self.m + self.n

    @property
    def x(self) -> np.ndarray:
        return self.coords[: self.m]

    @property
    def y(self) -> np.ndarray:
        return self.coords[self.m :]

    @property
    def x_norm(self) -> float:
        return float(np.linalg.norm(self.x))

    @property
    def y_norm(self) -> float:
        return float(np.linalg.norm(self.y))


@dataclass(frozen=True)
class UnimodularBasis:
    """Basis matrix of a unimodular lattice; lattice = {columns @ k : k in Z^d}.

    Orientation is not enforced: |det| must be 1 (within ``DET_TOL``), so an
    integral change of basis with determinant -1 still gives a valid basis.
    """

    columns: np.ndarray
    m: int
    n: int

    def __post_init__(self):
        _check_dims(self.m, self.n)
        cols = _frozen(self.columns)
        d = self.m + self.n
        if cols.shape != (d, d):
            raise ValidationError(f"basis must be {d}x{d}, got shape {cols.shape}")
        if not np.all(np.isfinite(cols)):
            raise ValidationError("basis has non-finite entries")
        det = float(np.linalg.det(cols))
        if abs(abs(det) - 1.0) > DET_TOL:
            raise ValidationError(f"basis is not unimodular: det = {det!r}")
        object.__setattr__(self, "columns", cols)

    @classmethod
    def _trusted(cls, columns: np.ndarray, m: int, n: int) -> "UnimodularBasis":
        # Skips the determinant check; for matrices unimodular by construction
        # (flows of valid bases) where LU round-off on badly scaled rows would
        # otherwise trip the tolerance.
        obj = object.__new__(cls)
        object.__setattr__(obj, "columns", _frozen(columns))
        object.__setattr__(obj, "m", m)
        object.__setattr__(obj, "n", n)
        return obj

    @classmethod
    def identity(cls, m: int, n: int) -> "UnimodularBasis":
        return cls(np.eye(m + n), m, n)

    @property
    def d(self) -> int:
        return self.m + self.n

    def det(self) -> float:
        return float(np.linalg.det(self.columns))

    def point(self, coeffs) -> SplitVector:
        return SplitVector(self.columns @ np.asarray(coeffs, dtype=float), self.m, self.n)


@dataclass(frozen=True)
class AffineLattice:
    """The translate {basis @ (k + offset_coeffs) : k in Z^d}; offsets are stored mod 1."""

    basis: UnimodularBasis
    offset_coeffs: np.ndarray

    def __post_init__(self):
        off = np.asarray(self.offset_coeffs, dtype=float).reshape(-1)
        if off.shape[0] != self.basis.d:
            raise ValidationError(f"offset has {off.shape[0]} coefficients, expected {self.basis.d}")
        if not np.all(np.isfinite(off)):
            raise ValidationError("offset has non-finite entries")
        off = off - np.floor(off)
        # x - floor(x) can round up to exactly 1.0 for tiny negative x
        off[off >= 1.0] = 0.0
        object.__setattr__(self, "offset_coeffs", _frozen(off))

    @classmethod
    def from_vector(cls, basis: UnimodularBasis, v) -> "AffineLattice":
        """Translate by an ambient vector v (converted to basis coefficients)."""
        return cls(basis, np.linalg.solve(basis.columns, np.asarray(v, dtype=float)))

    @property
    def m(self) -> int:
        return self.basis.m

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def d(self) -> int:
        return self.basis.d

    @property
    def offset(self) -> np.ndarray:
        return self.basis.columns @ self.offset_coeffs


@dataclass(frozen=True)
class HDecomposition:
    """g = [[B, 0], [C, D]] @ h_A."""

    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    A: np.ndarray

    def recompose(self) -> np.ndarray:
        return recompose(self.B, self.C, self.D, self.A)


def ball_volume(k: int) -> float:
    """Volume of the unit ball in R^k."""
    if int(k) != k or k < 1:
        raise ValidationError(f"dimension must be a positive integer, got {k!r}")
    return math.pi ** (k / 2) / math.gamma(k / 2 + 1)


def sphere_area(k: int) -> float:
    """Surface area of the unit sphere S^{k-1} in R^k."""
    if int(k) != k or k < 1:
        raise ValidationError(f"dimension must be a positive integer, got {k!r}")
    return 2 * math.pi ** (k / 2) / math.gamma(k / 2)


def flow_factors(m: int, n: int, t: float) -> tuple[float, float]:
    """Scale factors (x-block, y-block) of g_t = diag(e^{(n/m)t} I_m, e^{-t} I_n)."""
    return math.exp(n / m * t), math.exp(-t)


def dyadic_flow_factors(m: int, n: int, j: int) -> tuple[float, float]:
    """Scale factors of g_{j log 2}, exact powers of two whenever m divides j*n."""
    if (j * n) % m == 0:
        fx = math.ldexp(1.0, j * n // m)
    else:
        fx = 2.0 ** (j * n / m)
    return fx, math.ldexp(1.0, -j)


def _scale_rows(columns: np.ndarray, m: int, fx: float, fy: float) -> np.ndarray:
    out = np.array(columns, dtype=float, copy=True)
    out[:m] *= fx
    out[m:] *= fy
    return out


def apply_flow(lattice, t: float):
    """Push a lattice (or affine lattice, or split vector) forward by g_t."""
    if isinstance(lattice, SplitVector):
        fx, fy = flow_factors(lattice.m, lattice.n, t)
        return SplitVector(_scale_rows(lattice.coords[:, None], lattice.m, fx, fy)[:, 0], lattice.m, lattice.n)
    if isinstance(lattice, AffineLattice):
        return AffineLattice(apply_flow(lattice.basis, t), lattice.offset_coeffs)
    fx, fy = flow_factors(lattice.m, lattice.n, t)
    return UnimodularBasis._trusted(_scale_rows(lattice.columns, lattice.m, fx, fy), lattice.m, lattice.n)


def apply_dyadic_flow(lattice, j: int):
    """g_{log 2}^j applied with exact power-of-two factors where possible."""
    if isinstance(lattice, SplitVector):
        fx, fy = dyadic_flow_factors(lattice.m, lattice.n, j)
        return SplitVector(_scale_rows(lattice.coords[:, None], lattice.m, fx, fy)[:, 0], lattice.m, lattice.n)
    if isinstance(lattice, AffineLattice):
        return AffineLattice(apply_dyadic_flow(lattice.basis, j), lattice.offset_coeffs)
    fx, fy = dyadic_flow_factors(lattice.m, lattice.n, j)
    return UnimodularBasis._trusted(_scale_rows(lattice.columns, lattice.m, fx, fy), lattice.m, lattice.n)


def shear_matrix(A) -> UnimodularBasis:
    """h_A = [[I_m, -A], [0, I_n]] as a lattice basis."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    m, n = A.shape
    if not np.all(np.isfinite(A)):
        raise ValidationError("A has non-finite entries")
    h = np.eye(m + n)
    h[:m, m:] = -A
    return UnimodularBasis(h, m, n)


def recompose(B, C, D, A) -> np.ndarray:
    B, C, D, A = (np.atleast_2d(np.asarray(z, dtype=float)) for z in (B, C, D, A))
    m, n = A.shape
    lower = np.zeros((m + n, m + n))
    lower[:m, :m] = B
    lower[m:, :m] = C
    lower[m:, m:] = D
    h = np.eye(m + n)
    h[:m, m:] = -A
    return lower @ h


def decompose(g, m: int, n: int) -> HDecomposition:
    """Write g = [[B, 0], [C, D]] h_A for g with top-left m x m block invertible."""
    _check_dims(m, n)
    g = np.asarray(g, dtype=float)
    if g.shape != (m + n, m + n):
        raise ValidationError(f"matrix must be {m + n}x{m + n}, got {g.shape}")
    det = float(np.linalg.det(g))
    if abs(det - 1.0) > DET_TOL:
        raise ValidationError(f"matrix must have determinant 1, got {det!r}")
    beta, alpha = g[:m, :m], g[:m, m:]
    gamma, delta = g[m:, :m], g[m:, m:]
    # relative singularity test; an exactly singular block is the common case
    if abs(np.linalg.det(beta)) <= 1e-12 * max(1.0, np.linalg.norm(beta)) ** m:
        raise SingularBlockError("top-left block is singular; matrix has no shear decomposition")
    beta_inv_alpha = np.linalg.solve(beta, alpha)
    return HDecomposition(
        B=beta.copy(),
        C=gamma.copy(),
        D=delta - gamma @ beta_inv_alpha,
        A=-beta_inv_alpha,
    )


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])
