"""Thinning regions ||x||^m ||y||^n <= b, y_lo <= ||y|| < y_hi.

Membership is evaluated on squared norms, (|x|^2)^m (|y|^2)^n <= b^2, with
integer powers by repeated multiplication. The compiled kernels use the same
arithmetic, so the Python predicate and the scanners agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .geometry import SplitVector, ball_volume, sphere_area
from .stats import MCEstimate


@dataclass(frozen=True)
class ThinningRegion:
    b: float
    m: int
    n: int
    y_lo: float = 1.0
    y_hi: float = 2.0
    theta: float = 0.0

    def __post_init__(self):
        if not (self.b > 0 and math.isfinite(self.b)):
            raise ValidationError(f"b must be a positive real, got {self.b!r}")
        if int(self.m) != self.m or int(self.n) != self.n or self.m < 1 or self.n < 1:
            raise ValidationError(f"m, n must be positive integers, got {self.m}, {self.n}")
        if not self.y_lo >= 1.0:
            raise ValidationError(f"y_lo must be >= 1, got {self.y_lo!r}")
        if not self.y_hi >= self.y_lo:
            raise ValidationError(f"y_hi must be >= y_lo, got {self.y_hi!r} < {self.y_lo!r}")
        if self.theta != 0.0 and (self.m, self.n) != (1, 1):
            raise ValidationError("rotated regions are only supported for m = n = 1")
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "y_lo", float(self.y_lo))
        object.__setattr__(self, "y_hi", float(self.y_hi))
        object.__setattr__(self, "theta", float(self.theta))

    @property
    def d(self) -> int:
        return self.m + self.n

    @property
    def empty(self) -> bool:
        return self.y_hi <= self.y_lo

    def x_radius(self) -> float:
        """Largest ||x'|| attained in the region."""
        return (self.b / self.y_lo**self.n) ** (1.0 / self.m)

    def unrotated(self) -> "ThinningRegion":
        return ThinningRegion(self.b, self.m, self.n, self.y_lo, self.y_hi, 0.0)

    def with_shell(self, y_lo: float, y_hi: float) -> "ThinningRegion":
        return ThinningRegion(self.b, self.m, self.n, y_lo, y_hi, self.theta)

    def frame(self) -> np.ndarray:
        """Matrix taking ambient coordinates to the region's own (x', y') frame."""
        if self.theta == 0.0:
            return np.eye(self.d)
        c, s = math.cos(self.theta), math.sin(self.theta)
        return np.array([[c, s], [-s, c]])


def member_sq(X: float, Y: float, m: int, n: int, b2: float, ylo2: float, yhi2: float) -> bool:
    """Membership on squared block norms; mirrored exactly by the kernels."""
    if Y < ylo2 or Y >= yhi2:
        return False
    p = 1.0
    for _ in range(m):
        p *= X
    for _ in range(n):
        p *= Y
    return p <= b2


def _block_sq(coords, m: int) -> tuple[float, float]:
    X = 0.0
    Y = 0.0
    for i, c in enumerate(coords):
        if i < m:
            X += c * c
        else:
            Y += c * c
    return X, Y


def contains(region: ThinningRegion, v) -> bool:
    if isinstance(v, SplitVector):
        if (v.m, v.n) != (region.m, region.n):
            raise ValidationError(f"vector split ({v.m},{v.n}) does not match region ({region.m},{region.n})")
        coords = v.coords
    else:
        coords = np.asarray(v, dtype=float).reshape(-1)
        if coords.shape[0] != region.d:
            raise ValidationError(f"vector has {coords.shape[0]} coordinates, region needs {region.d}")
    if region.theta != 0.0:
        coords = region.frame() @ coords
    X, Y = _block_sq([float(c) for c in coords], region.m)
    return member_sq(X, Y, region.m, region.n, region.b * region.b, region.y_lo * region.y_lo, region.y_hi * region.y_hi)


def contains_many(region: ThinningRegion, points: np.ndarray) -> np.ndarray:
    """Vectorised membership for an (k, d) array of points."""
    pts = np.asarray(points, dtype=float)
    if region.theta != 0.0:
        pts = pts @ region.frame().T
    X = np.zeros(pts.shape[0])
    Y = np.zeros(pts.shape[0])
    for i in range(region.d):
        if i < region.m:
            X += pts[:, i] * pts[:, i]
        else:
            Y += pts[:, i] * pts[:, i]
    p = np.ones(pts.shape[0])
    for _ in range(region.m):
        p *= X
    for _ in range(region.n):
        p *= Y
    return (Y >= region.y_lo**2) & (Y < region.y_hi**2) & (p <= region.b**2)


class IndicatorF:
    """Indicator function of a thinning region."""

    def __init__(self, region: ThinningRegion):
        self.region = region

    def __call__(self, v) -> int:
        return int(contains(self.region, v))


def region_volume(region: ThinningRegion) -> float:
    """b * B_m * C_n * log(y_hi / y_lo); rotation does not change it."""
    if region.empty:
        return 0.0
    return region.b * ball_volume(region.m) * sphere_area(region.n) * math.log(region.y_hi / region.y_lo)


def dyadic_block(b: float, m: int, n: int, j: int, theta: float = 0.0) -> ThinningRegion:
    """The slab 2^j <= ||y|| < 2^{j+1}; equals g_{-j log 2} of the j = 0 block."""
    if int(j) != j or j < 0:
        raise ValidationError(f"block index must be a nonnegative integer, got {j!r}")
    return ThinningRegion(b, m, n, math.ldexp(1.0, j), math.ldexp(1.0, j + 1), theta)


def bounding_box(region: ThinningRegion) -> np.ndarray:
    """Half-widths of an axis-aligned box (ambient frame) containing the region."""
    r = region.x_radius()
    half = np.array([r] * region.m + [region.y_hi] * region.n)
    if region.theta != 0.0:
        # frame() maps ambient -> region frame, so its transpose maps back
        half = np.abs(region.frame().T) @ half
    return half


def mc_volume(region: ThinningRegion, samples: int, rng: np.random.Generator, chunk: int = 1 << 20) -> MCEstimate:
    """Hit-or-miss Monte Carlo volume over the bounding box."""
    half = bounding_box(region)
    box_vol = float(np.prod(2 * half))
    hits = 0
    done = 0
    while done < samples:
        k = min(chunk, samples - done)
        pts = (rng.random((k, region.d)) * 2 - 1) * half
        hits += int(np.count_nonzero(contains_many(region, pts)))
        done += k
    p = hits / samples
    return MCEstimate(p * box_vol, box_vol * math.sqrt(p * (1 - p) / samples), samples)
