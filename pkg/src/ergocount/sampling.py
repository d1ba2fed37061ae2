"""Reproducible random sources.

Every random quantity is drawn from a :class:`SeededStream`, a value type
naming a Philox stream by (master_seed, stream_index). Work item *i* of an
experiment always uses stream *i*, so the draws do not depend on how work is
scheduled across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diophantine import FormSystem, ToralSystem
from .errors import ValidationError
from .geometry import AffineLattice, UnimodularBasis, shear_matrix


@dataclass(frozen=True)
class SeededStream:
    master_seed: int = 0
    stream_index: int = 0
    path: tuple = ()

    def __post_init__(self):
        if not (0 <= int(self.master_seed) < 2**64):
            raise ValidationError(f"seed must be an unsigned 64-bit integer, got {self.master_seed!r}")
        if int(self.stream_index) < 0:
            raise ValidationError("stream index must be nonnegative")

    def rng(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        ss = np.random.SeedSequence(int(self.master_seed), spawn_key=(int(self.stream_index), *self.path))
        return np.random.Generator(np.random.Philox(ss))

    def child(self, index: int) -> "SeededStream":
        """Stream for sub-task ``index``; disjoint from the parent's other children."""
        return SeededStream(self.master_seed, self.stream_index, (*self.path, int(index)))


def _rng(source) -> np.random.Generator:
    if isinstance(source, np.random.Generator):
        return source
    if isinstance(source, SeededStream):
        return source.rng()
    raise TypeError(f"expected SeededStream or numpy Generator, got {type(source).__name__}")


def sample_form(m: int, n: int, affine: bool, stream, b: float = 1.0) -> FormSystem:
    """A uniform on [0,1)^{m x n}, w uniform on [0,1)^m (zero if not affine)."""
    rng = _rng(stream)
    A = rng.random((m, n))
    w = rng.random(m) if affine else np.zeros(m)
    return FormSystem(A, w, b)


def sample_toral(m: int, affine: bool, stream, b: float = 1.0) -> ToralSystem:
    rng = _rng(stream)
    alpha = rng.random(m)
    target = rng.random(m) if affine else np.zeros(m)
    return ToralSystem(alpha, target, b)


def haar_x2_columns(rng: np.random.Generator, count: int, rotate: bool = True) -> np.ndarray:
    """(count, 2, 2) array of Haar-random unimodular bases of R^2.

    The shape z = x + iy is drawn from the hyperbolic area dx dy / y^2 on the
    standard fundamental domain |x| <= 1/2, x^2 + y^2 >= 1: the x-marginal
    has density proportional to (1 - x^2)^{-1/2}, realised as x = sin(phi)
    with phi uniform on [-pi/6, pi/6], and y | x has density y0 / y^2 on
    [y0, inf), y0 = sqrt(1 - x^2). The basis (1, 0)/sqrt(y), (x, y)/sqrt(y)
    is then rotated by a uniform angle.
    """
    phi = (rng.random(count) * 2 - 1) * (math.pi / 6)
    u = rng.random(count)
    psi = rng.random(count) * (2 * math.pi)
    x = np.sin(phi)
    y0 = np.sqrt(1 - x * x)
    y = y0 / (1 - u)
    s = 1 / np.sqrt(y)
    cols = np.zeros((count, 2, 2))
    cols[:, 0, 0] = s
    cols[:, 0, 1] = x * s
    cols[:, 1, 1] = y * s
    if rotate:
        c, sn = np.cos(psi), np.sin(psi)
        R = np.stack([np.stack([c, -sn], -1), np.stack([sn, c], -1)], -2)
        cols = R @ cols
    return np.ascontiguousarray(cols)


def sample_haar_x2(stream, rotate: bool = True) -> UnimodularBasis:
    return UnimodularBasis(haar_x2_columns(_rng(stream), 1, rotate)[0], 1, 1)


def sample_affine_offset(basis: UnimodularBasis, stream) -> AffineLattice:
    """Uniform point of the torus R^d / lattice, as offset coefficients in [0,1)^d."""
    return AffineLattice(basis, _rng(stream).random(basis.d))


def in_fundamental_domain(basis: UnimodularBasis, tol: float = 1e-12) -> bool:
    """Whether an unrotated basis (1,0)/sqrt(y), (x,y)/sqrt(y) has |x| <= 1/2 and x^2+y^2 >= 1."""
    c = basis.columns
    if abs(c[1, 0]) > tol or c[0, 0] <= 0:
        return False
    scale = c[0, 0]
    x, y = c[0, 1] / scale, c[1, 1] / scale
    return abs(x) <= 0.5 + tol and x * x + y * y >= 1 - tol


def sample_unimodular(m: int, n: int, stream) -> UnimodularBasis:
    """Random unimodular basis: Haar for d = 2, otherwise h_A with A uniform on [0,1)^{m x n}.

    For d > 2 the law is not Haar, but almost every A gives an almost-everywhere
    generic lattice, which is what the counting limits need.
    """
    rng = _rng(stream)
    if (m, n) == (1, 1):
        return UnimodularBasis(haar_x2_columns(rng, 1)[0], 1, 1)
    return shear_matrix(rng.random((m, n)))
