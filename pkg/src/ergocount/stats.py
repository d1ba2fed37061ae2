from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    samples: int

    def __post_init__(self):
        if self.samples < 2:
            raise ValidationError("an estimate needs at least two samples")

    def within(self, target: float, k: float = 3.0) -> bool:
        return abs(self.mean - target) <= k * self.stderr

    @property
    def rel_stderr(self) -> float:
        return self.stderr / abs(self.mean) if self.mean else math.inf


class Welford:
    """Running mean/variance, fed in a fixed order so results are reproducible."""

    def __init__(self):
        self.count = 0
        self.mean = 0.0
        self._m2 = 0.0

    def add(self, value: float) -> None:
        self.count += 1
        delta = value - self.mean
        self.mean += delta / self.count
        self._m2 += delta * (value - self.mean)

    def extend(self, values: Iterable[float]) -> "Welford":
        for v in values:
            self.add(float(v))
        return self

    @property
    def variance(self) -> float:
        return self._m2 / (self.count - 1) if self.count > 1 else math.nan

    def estimate(self) -> MCEstimate:
        return MCEstimate(self.mean, math.sqrt(self.variance / self.count), self.count)


def estimate(values) -> MCEstimate:
    return Welford().extend(np.asarray(values, dtype=float).ravel()).estimate()
