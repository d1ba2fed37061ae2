"""Monte Carlo check of Siegel's mean value formula on the space of planar lattices.

For a thinning region R, the mean over Haar-random unimodular lattices of
the number of nonzero lattice points in R equals vol(R); over affine
lattices (uniform translate) it is again vol(R); over primitive vectors it
is vol(R) / zeta(2).
"""

from __future__ import annotations

import math

import numpy as np

from . import _backend
from ._parallel import pmap
from .errors import BudgetExceeded, ValidationError
from .lattice import DEFAULT_BUDGET
from .regions import ThinningRegion, region_volume
from .sampling import SeededStream, haar_x2_columns
from .stats import MCEstimate, Welford

VARIANTS = ("plain", "primitive", "affine")
CHUNK = 4096


def zeta(d: int) -> float:
    """Riemann zeta at an integer d >= 2.

    Direct summation of the first K terms plus the Euler-Maclaurin tail
    K^{1-d}/(d-1) - K^{-d}/2 + d K^{-d-1}/12 - d(d+1)(d+2) K^{-d-3}/720;
    for K = 1000 the neglected remainder is below 1e-20.
    """
    if int(d) != d or d < 2:
        raise ValidationError(f"zeta is only provided for integers d >= 2, got {d!r}")
    K = 1000
    s = math.fsum(k ** (-float(d)) for k in range(1, K))
    tail = (K ** (1.0 - d) / (d - 1) + K ** (-float(d)) / 2 + d * K ** (-d - 1.0) / 12
            - d * (d + 1) * (d + 2) * K ** (-d - 3.0) / 720)
    return s + tail


def siegel_target(region: ThinningRegion, variant: str) -> float:
    vol = region_volume(region)
    return vol / zeta(region.d) if variant == "primitive" else vol


def siegel_counts(region: ThinningRegion, samples: int, variant: str, stream: SeededStream,
                  budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Lattice-point counts of ``samples`` Haar-random planar (affine) lattices in the region."""
    if (region.m, region.n) != (1, 1):
        raise ValidationError("Siegel averages are only supported in dimension 2 (no Haar sampler for d > 2)")
    if variant not in VARIANTS:
        raise ValidationError(f"variant must be one of {VARIANTS}, got {variant!r}")
    if samples < 2:
        raise ValidationError("need at least 2 samples")
    frame = region.frame()
    b2, ylo2 = region.b**2, region.y_lo**2
    # dyadic blocks [y_lo 2^k, y_lo 2^(k+1)); diag(2^k, 2^-k) maps block k onto
    # block 0 exactly, and block 0 has a small enumeration box
    blocks = []
    k = 0
    while math.ldexp(region.y_lo, k) < region.y_hi:
        top = min(math.ldexp(region.y_lo, k + 1), region.y_hi)
        blocks.append((k, math.ldexp(top, -k)))
        k += 1
    sizes = [min(CHUNK, samples - start) for start in range(0, samples, CHUNK)]

    def run(idx: int) -> np.ndarray:
        rng = stream.child(idx).rng()
        cols = haar_x2_columns(rng, sizes[idx])
        offs = rng.random((sizes[idx], 2)) if variant == "affine" else np.zeros((sizes[idx], 2))
        if region.theta != 0.0:
            cols = frame @ cols
        total = np.zeros(sizes[idx], dtype=np.int64)
        for k, top in blocks:
            flowed = np.empty_like(cols)
            flowed[:, 0, :] = np.ldexp(cols[:, 0, :], k)
            flowed[:, 1, :] = np.ldexp(cols[:, 1, :], -k)
            got = _backend.kernels.count_d2_batch(flowed, offs, b2, ylo2, top * top, region.x_radius(), top,
                                                  variant == "primitive", int(budget))
            total = np.where((total < 0) | (got < 0), -1, total + got)
        return total

    counts = np.concatenate(pmap(run, range(len(sizes))))
    if np.any(counts < 0):
        raise BudgetExceeded("a sampled lattice needed more candidates than the budget allows")
    return counts


def siegel_average(region: ThinningRegion, samples: int, variant: str = "plain",
                   stream: SeededStream | None = None, budget: int = DEFAULT_BUDGET) -> MCEstimate:
    """Mean and standard error of the Siegel transform of the region's indicator."""
    if samples < 100:
        raise ValidationError("Siegel averages need at least 100 samples")
    stream = SeededStream() if stream is None else stream
    counts = siegel_counts(region, samples, variant, stream, budget)
    return Welford().extend(counts).estimate()
