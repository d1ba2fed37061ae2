"""Direct counters for approximants of linear and affine forms and toral orbits.

Conventions follow the defining sets exactly: forms use a non-strict
inequality and count both signs of q; toral translations use a strict one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import BudgetExceeded, ValidationError
from .geometry import AffineLattice, shear_matrix
from .lattice import DEFAULT_BUDGET, count_points
from .regions import ThinningRegion


def _mod1(v: np.ndarray) -> np.ndarray:
    v = v - np.floor(v)
    v[v >= 1.0] = 0.0
    return v


@dataclass(frozen=True)
class FormSystem:
    """m linear forms in n variables, x = Aq, with optional shift w (stored mod 1)."""

    A: np.ndarray
    w: np.ndarray = field(default=None)
    b: float = 1.0

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        if A.ndim != 2 or not np.all(np.isfinite(A)):
            raise ValidationError("A must be a finite m x n matrix")
        w = np.zeros(A.shape[0]) if self.w is None else np.asarray(self.w, dtype=float).reshape(-1)
        if w.shape[0] != A.shape[0] or not np.all(np.isfinite(w)):
            raise ValidationError(f"w must be a finite vector of length m={A.shape[0]}")
        if not (self.b > 0 and math.isfinite(self.b)):
            raise ValidationError(f"b must be positive, got {self.b!r}")
        A = np.ascontiguousarray(A)
        w = _mod1(w)
        A.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "b", float(self.b))

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def affine(self) -> bool:
        return bool(np.any(self.w != 0))


@dataclass(frozen=True)
class ToralSystem:
    alpha: np.ndarray
    target: np.ndarray = field(default=None)
    b: float = 1.0

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float).reshape(-1)
        target = np.zeros_like(alpha) if self.target is None else np.asarray(self.target, dtype=float).reshape(-1)
        if alpha.shape != target.shape or alpha.size == 0:
            raise ValidationError("alpha and target must be vectors of the same positive length")
        if not (np.all(np.isfinite(alpha)) and np.all(np.isfinite(target))):
            raise ValidationError("alpha and target must be finite")
        if not (self.b > 0 and math.isfinite(self.b)):
            raise ValidationError(f"b must be positive, got {self.b!r}")
        alpha, target = _mod1(alpha), _mod1(target)
        alpha.setflags(write=False)
        target.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "b", float(self.b))

    @property
    def m(self) -> int:
        return self.alpha.shape[0]


def forms_shell_counts(system: FormSystem, edges, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Counts binned by ||q|| into [edges[i], edges[i+1]); edges increasing, edges[0] >= 1."""
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 1 or edges[0] < 1 or np.any(np.diff(edges) < 0):
        raise ValidationError("edges must be an increasing sequence starting at >= 1")
    edges2 = np.ascontiguousarray(edges * edges)
    res = _backend.kernels.forms_blocks(system.A, system.w, system.b, edges2, int(budget))
    if res is None:
        raise BudgetExceeded(f"q-shell up to {edges[-1]:g} exceeds the candidate budget {budget}; use a smaller T")
    return np.asarray(res, dtype=np.int64)


def count_forms(system: FormSystem, T: float, budget: int = DEFAULT_BUDGET) -> int:
    """#{(p, q) : ||Aq - p - w|| <= b ||q||^{-n/m}, 1 <= ||q|| < T}."""
    if not T >= 1:
        raise ValidationError(f"T must be >= 1, got {T!r}")
    if T == 1:
        return 0
    return int(forms_shell_counts(system, [1.0, float(T)], budget).sum())


def forms_lattice(system: FormSystem):
    """h_A Z^d, translated by (w, 0) when the system is affine."""
    h = shear_matrix(system.A)
    if system.affine:
        # h_A^{-1} (w, 0) = (w, 0), so the offset coefficients are (w, 0)
        return AffineLattice(h, np.concatenate([system.w, np.zeros(system.n)]))
    return h


def forms_lattice_crosscheck(system: FormSystem, T: float, budget: int = DEFAULT_BUDGET) -> tuple[int, int]:
    """(direct count, lattice count with b -> b^m); the two must coincide."""
    direct = count_forms(system, T, budget)
    if T == 1:
        return direct, 0
    region = ThinningRegion(system.b**system.m, system.m, system.n, 1.0, float(T))
    via = count_points(forms_lattice(system), region, budget=budget)
    return direct, via


def toral_shell_counts(system: ToralSystem, edges) -> np.ndarray:
    """Hit counts binned by step k into [edges[i], edges[i+1]); edges are integers >= 1."""
    edges = np.asarray(edges, dtype=np.int64)
    if edges.ndim != 1 or edges.size < 1 or edges[0] < 1 or np.any(np.diff(edges) < 0):
        raise ValidationError("edges must be an increasing integer sequence starting at >= 1")
    res = _backend.kernels.toral_blocks(system.alpha, system.target, system.b, np.ascontiguousarray(edges))
    return np.asarray(res, dtype=np.int64)


def count_toral(system: ToralSystem, N: int) -> int:
    """#{1 <= k <= N : ||k alpha - target||_Z < b k^{-1/m}}."""
    if int(N) != N or N < 1:
        raise ValidationError(f"N must be a positive integer, got {N!r}")
    return int(toral_shell_counts(system, [1, int(N) + 1]).sum())
