"""Enumeration and counting of (affine) lattice points in thinning regions.

Two counting paths are provided and must agree exactly:

* ``direct``: reduce the basis once and scan the integer box covering the
  whole region;
* ``dyadic``: split the region into slabs 2^j <= ||y|| < 2^{j+1}, push the
  lattice by g_{j log 2} so each slab becomes the unit slab 1 <= ||y|| < 2,
  re-reduce, and scan a small box per slab.

The second path is the Birkhoff-sum decomposition and is the fast one for
long shells: each slab costs O(1) after reduction, so a shell [1, T) costs
O(log T) instead of a box growing like T^n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import _backend
from .errors import BudgetExceeded, ValidationError
from .geometry import (
    AffineLattice,
    SplitVector,
    UnimodularBasis,
    dyadic_flow_factors,
    flow_factors,
)
from .regions import ThinningRegion

DEFAULT_BUDGET = 10**9
LLL_DELTA = 0.75
DYADIC_THRESHOLD = 2.0**6

Lattice = Union[UnimodularBasis, AffineLattice]


def lll_transform(columns: np.ndarray, delta: float = LLL_DELTA) -> np.ndarray:
    """Integer unimodular U such that columns @ U is LLL-reduced."""
    B = np.array(columns, dtype=float)
    d = B.shape[1]
    U = np.eye(d, dtype=np.int64)

    def gso(B):
        Bs = np.zeros_like(B)
        mu = np.zeros((d, d))
        for i in range(d):
            v = B[:, i].copy()
            for j in range(i):
                mu[i, j] = B[:, i] @ Bs[:, j] / (Bs[:, j] @ Bs[:, j])
                v -= mu[i, j] * Bs[:, j]
            Bs[:, i] = v
        return Bs, mu

    Bs, mu = gso(B)
    k = 1
    guard = 0
    while k < d:
        guard += 1
        if guard > 100000:
            raise RuntimeError("LLL did not terminate")
        for j in range(k - 1, -1, -1):
            if abs(mu[k, j]) > 0.5:
                r = round(mu[k, j])
                B[:, k] -= r * B[:, j]
                U[:, k] -= r * U[:, j]
                # keep the float basis tied to the exact integer transform
                B[:, k] = columns @ U[:, k]
                Bs, mu = gso(B)
        if Bs[:, k] @ Bs[:, k] >= (delta - mu[k, k - 1] ** 2) * (Bs[:, k - 1] @ Bs[:, k - 1]):
            k += 1
        else:
            B[:, [k - 1, k]] = B[:, [k, k - 1]]
            U[:, [k - 1, k]] = U[:, [k, k - 1]]
            Bs, mu = gso(B)
            k = max(k - 1, 1)
    return U


def reduce_basis(basis: UnimodularBasis) -> UnimodularBasis:
    """LLL-reduced basis (delta = 0.75) of the same lattice."""
    U = lll_transform(basis.columns)
    return UnimodularBasis._trusted(basis.columns @ U, basis.m, basis.n)


@dataclass(frozen=True)
class CountRequest:
    lattice: Lattice
    region: ThinningRegion
    primitive_only: bool = False
    strategy: str = "auto"

    def __post_init__(self):
        if self.primitive_only and isinstance(self.lattice, AffineLattice):
            raise ValidationError("primitivity is undefined for translated lattices")
        if self.strategy not in ("auto", "direct", "dyadic"):
            raise ValidationError(f"unknown strategy {self.strategy!r}")
        if (self.lattice.m, self.lattice.n) != (self.region.m, self.region.n):
            raise ValidationError(
                f"lattice split ({self.lattice.m},{self.lattice.n}) does not match region ({self.region.m},{self.region.n})"
            )

    def count(self, budget: int = DEFAULT_BUDGET) -> int:
        return count_points(self.lattice, self.region, primitive_only=self.primitive_only,
                            strategy=self.strategy, budget=budget)


def _frame(lattice: Lattice, region: ThinningRegion):
    """Basis in the region's frame plus offset coefficients."""
    if isinstance(lattice, AffineLattice):
        cols, off = lattice.basis.columns, lattice.offset_coeffs
    else:
        cols, off = lattice.columns, np.zeros(lattice.d)
    if region.theta != 0.0:
        cols = region.frame() @ cols
    return np.ascontiguousarray(cols, dtype=float), np.ascontiguousarray(off, dtype=float)


def _box(M: np.ndarray, U: np.ndarray, off: np.ndarray, half: np.ndarray):
    """Integer bounds on k' such that M (U k' + off) can lie in the box |v_i| <= half_i."""
    inv = np.linalg.inv(M @ U)
    R = np.abs(inv) @ half
    R = R * (1.0 + 1e-9) + 1e-9
    s = np.linalg.solve(U.astype(float), off)
    lo = np.ceil(-R - s).astype(np.int64)
    hi = np.floor(R - s).astype(np.int64)
    return lo, hi


def _box_size(lo: np.ndarray, hi: np.ndarray) -> int:
    size = 1
    for a, b in zip(lo.tolist(), hi.tolist()):
        size *= max(0, b - a + 1)
    return size


def _scan(M, off, m, n, b, y_lo, y_hi, primitive, budget, collect):
    """Scan one region (already in its own frame, unrotated)."""
    if y_hi <= y_lo:
        return np.empty((0, m + n), dtype=np.int64) if collect else 0
    half = np.array([(b / y_lo**n) ** (1.0 / m)] * m + [y_hi] * n)
    # reduce relative to the box so the coefficient bounds stay tight for long thin boxes
    U = lll_transform(M / half[:, None])
    lo, hi = _box(M, U, off, half)
    if _box_size(lo, hi) > budget:
        raise BudgetExceeded(
            f"enumeration too large ({_box_size(lo, hi)} candidates > budget {budget}), use dyadic strategy"
        )
    args = (np.ascontiguousarray(M), np.ascontiguousarray(U, dtype=np.int64), off, lo, hi, m, n,
            b * b, y_lo * y_lo, y_hi * y_hi, bool(primitive))
    k = _backend.kernels
    return k.collect_box(*args) if collect else int(k.scan_box(*args))


def dyadic_slabs(y_lo: float, y_hi: float):
    """(scale, y_hi/scale) pairs: slab j is [scale_j, min(2 scale_j, y_hi))."""
    out = []
    j = 0
    while True:
        scale = y_lo * math.ldexp(1.0, j)
        if scale >= y_hi:
            break
        out.append((j, scale, min(2.0, y_hi / scale)))
        j += 1
    return out


def _flowed(M: np.ndarray, m: int, n: int, y_lo: float, j: int, scale: float) -> np.ndarray:
    if y_lo == 1.0:
        fx, fy = dyadic_flow_factors(m, n, j)
    else:
        fx, fy = flow_factors(m, n, math.log(scale))
    F = M.copy()
    F[:m] *= fx
    F[m:] *= fy
    return F


def _run(lattice: Lattice, region: ThinningRegion, primitive: bool, strategy: str, budget: int, collect: bool):
    if primitive and isinstance(lattice, AffineLattice):
        raise ValidationError("primitivity is undefined for translated lattices")
    if (lattice.m, lattice.n) != (region.m, region.n):
        raise ValidationError(
            f"lattice split ({lattice.m},{lattice.n}) does not match region ({region.m},{region.n})"
        )
    if strategy == "auto":
        strategy = "dyadic" if region.y_hi / region.y_lo > DYADIC_THRESHOLD else "direct"
    if strategy not in ("direct", "dyadic"):
        raise ValidationError(f"unknown strategy {strategy!r}")
    M, off = _frame(lattice, region)
    m, n, b = region.m, region.n, region.b
    if strategy == "direct":
        return _scan(M, off, m, n, b, region.y_lo, region.y_hi, primitive, budget, collect)
    parts = []
    total = 0
    for j, scale, top in dyadic_slabs(region.y_lo, region.y_hi):
        F = _flowed(M, m, n, region.y_lo, j, scale)
        r = _scan(F, off, m, n, b, 1.0, top, primitive, budget, collect)
        if collect:
            parts.append(r)
        else:
            total += r
    if collect:
        return np.concatenate(parts) if parts else np.empty((0, m + n), dtype=np.int64)
    return total


def count_points(lattice: Lattice, region: ThinningRegion, *, primitive_only: bool = False,
                 strategy: str = "auto", budget: int = DEFAULT_BUDGET) -> int:
    """Number of (affine) lattice points in the region.

    ``primitive_only`` keeps points whose integer coefficients in the given
    basis have gcd 1. Strategy ``auto`` picks ``dyadic`` for y_hi/y_lo > 64.
    """
    return int(_run(lattice, region, primitive_only, strategy, budget, collect=False))


def enumerate_coefficients(lattice: Lattice, region: ThinningRegion, *, primitive_only: bool = False,
                           strategy: str = "auto", budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Integer coefficient vectors k (rows) of the points basis @ (k + offset) in the region."""
    return _run(lattice, region, primitive_only, strategy, budget, collect=True)


def enumerate_points(lattice: Lattice, region: ThinningRegion, *, primitive_only: bool = False,
                     strategy: str = "direct", budget: int = DEFAULT_BUDGET) -> list[SplitVector]:
    """The lattice points in the region, in ambient coordinates."""
    K = enumerate_coefficients(lattice, region, primitive_only=primitive_only, strategy=strategy, budget=budget)
    if isinstance(lattice, AffineLattice):
        cols, off = lattice.basis.columns, lattice.offset_coeffs
    else:
        cols, off = lattice.columns, np.zeros(lattice.d)
    pts = (K + off) @ cols.T
    return [SplitVector(p, lattice.m, lattice.n) for p in pts]


def block_counts(lattice: Lattice, b: float, k: int, *, primitive_only: bool = False,
                 budget: int = DEFAULT_BUDGET) -> list[int]:
    """f_b-hat(g_{log 2}^i lattice) for i < k: unit-slab counts of the flowed, re-reduced lattice."""
    if k < 0:
        raise ValidationError(f"number of blocks must be nonnegative, got {k}")
    unit = ThinningRegion(b, lattice.m, lattice.n, 1.0, 2.0)
    if primitive_only and isinstance(lattice, AffineLattice):
        raise ValidationError("primitivity is undefined for translated lattices")
    M, off = _frame(lattice, unit)
    out = []
    for i in range(k):
        F = _flowed(M, lattice.m, lattice.n, 1.0, i, math.ldexp(1.0, i))
        out.append(int(_scan(F, off, lattice.m, lattice.n, b, 1.0, 2.0, primitive_only, budget, False)))
    return out


def birkhoff_counts(lattice: Lattice, b: float, k: int, *, primitive_only: bool = False,
                    budget: int = DEFAULT_BUDGET) -> list[int]:
    """Partial Birkhoff sums; entry j-1 counts the region 1 <= ||y|| < 2^j."""
    return np.cumsum(block_counts(lattice, b, k, primitive_only=primitive_only, budget=budget)).astype(int).tolist()
