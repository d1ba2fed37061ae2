"""Scenario runner producing convergence tables.

Every experiment evaluates a counting function at a grid of scales, for a
number of independently seeded samples, and compares it with
``normalizer * log(scale)``. The normalizer is always recomputed from ball
volumes, sphere areas and zeta values.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .diophantine import forms_shell_counts, toral_shell_counts
from .errors import ValidationError
from .geometry import AffineLattice, ball_volume, sphere_area
from .lattice import DEFAULT_BUDGET, block_counts
from .origami import CORPUS, Origami, count_saddle_connections, random_thetas
from ._parallel import pmap
from .regions import ThinningRegion, region_volume
from .sampling import SeededStream, sample_form, sample_toral, sample_unimodular
from .siegel import siegel_counts, zeta

EXPERIMENTS = ("forms", "affine-forms", "toral", "lattice", "affine-lattice", "siegel", "origami")
CSV_HEADER = ("experiment", "seed", "sample", "m", "n", "b", "scale", "count", "expected", "ratio")


@dataclass(frozen=True)
class Scenario:
    experiment: str
    m: int = 1
    n: int = 1
    b: float = 1.0
    log2T: int = 10
    N: int = 0
    samples: int = 20
    seed: int = 0
    primitive: bool = False
    inhomogeneous: bool = False
    origami: str = ""
    theta: str = "random"
    distinct_holonomies: bool = False
    budget: int = DEFAULT_BUDGET
    out: str = ""
    format: str = "csv"

    def __post_init__(self):
        e = self.experiment
        if e not in EXPERIMENTS:
            raise ValidationError(f"unknown experiment {e!r}; choose from {', '.join(EXPERIMENTS)}")
        for name in ("m", "n", "log2T", "N", "samples", "seed", "budget"):
            val = getattr(self, name)
            if isinstance(val, bool) or int(val) != val:
                raise ValidationError(f"{name} must be an integer, got {val!r}")
            object.__setattr__(self, name, int(val))
        if self.m < 1 or self.n < 1:
            raise ValidationError("m and n must be positive")
        if not (self.b > 0 and math.isfinite(self.b)):
            raise ValidationError(f"b must be positive, got {self.b!r}")
        object.__setattr__(self, "b", float(self.b))
        if self.samples < 1:
            raise ValidationError("samples must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be an unsigned 64-bit integer")
        if self.format not in ("csv", "json"):
            raise ValidationError(f"format must be csv or json, got {self.format!r}")
        if self.theta not in ("zero", "random"):
            raise ValidationError(f"theta policy must be zero or random, got {self.theta!r}")
        if e == "toral":
            if self.N < 2:
                raise ValidationError("the toral experiment needs N >= 2")
        elif not 1 <= self.log2T <= 60:
            raise ValidationError(f"log2T must lie in 1..60, got {self.log2T}")
        if self.primitive and e not in ("lattice", "siegel"):
            raise ValidationError("primitive counting applies to the lattice and siegel experiments only")
        if self.inhomogeneous and e not in ("toral", "siegel"):
            raise ValidationError("use the affine-* experiments; inhomogeneous applies to toral and siegel")
        if self.primitive and self.inhomogeneous:
            raise ValidationError("primitivity is undefined for translated lattices")
        if e in ("siegel", "origami") and (self.m, self.n) != (1, 1):
            raise ValidationError(f"the {e} experiment is planar: m = n = 1")
        if e == "siegel" and self.samples < 2:
            raise ValidationError("the siegel experiment needs at least 2 samples")
        if e == "origami" and not self.origami:
            raise ValidationError("the origami experiment needs an origami file")

    @classmethod
    def from_mapping(cls, data: dict, **overrides) -> "Scenario":
        known = {f.name for f in fields(cls)}
        merged = {k.replace("-", "_"): v for k, v in data.items()}
        merged.update({k: v for k, v in overrides.items() if v is not None})
        unknown = sorted(set(merged) - known)
        if unknown:
            raise ValidationError(f"unknown scenario keys: {', '.join(unknown)}")
        if "experiment" not in merged:
            raise ValidationError("scenario needs an experiment")
        return cls(**merged)

    @classmethod
    def from_toml(cls, path, **overrides) -> "Scenario":
        try:
            import tomllib
        except ModuleNotFoundError:  # Python < 3.11
            import tomli as tomllib
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ValidationError(f"{path}: {exc}") from None
        if "scenario" in data and isinstance(data["scenario"], dict):
            data = data["scenario"]
        return cls.from_mapping(data, **overrides)

    def load_origami(self) -> Origami:
        if os.path.exists(self.origami):
            return Origami.load(self.origami)
        if self.origami in CORPUS:
            return CORPUS[self.origami]
        raise ValidationError(f"origami file {self.origami!r} not found")


@dataclass(frozen=True)
class Row:
    experiment: str
    seed: int
    sample: int
    m: int
    n: int
    b: float
    scale: float
    count: int
    expected: float
    ratio: float


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def _json_num(x):
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(f"{x:.12g}") if math.isfinite(x) else None
    return x


@dataclass
class ConvergenceReport:
    scenario: Scenario
    normalizer: float
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    @property
    def scales(self) -> list[float]:
        return sorted({r.scale for r in self.rows})

    def mean_counts(self) -> dict:
        """Sample mean of the count at each scale."""
        acc: dict = {}
        for r in self.rows:
            acc.setdefault(r.scale, []).append(r.count)
        return {s: math.fsum(v) / len(v) for s, v in sorted(acc.items())}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow([_fmt(getattr(r, k)) for k in CSV_HEADER])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "scenario": {k: _json_num(v) for k, v in asdict(self.scenario).items() if k not in ("out", "format")},
            "rows": [{k: _json_num(getattr(r, k)) for k in CSV_HEADER} for r in self.rows],
            "summary": {k: _json_num(v) for k, v in self.summary.items()},
        }
        return json.dumps(doc, indent=2) + "\n"

    def render(self, fmt: str | None = None) -> str:
        return self.to_json() if (fmt or self.scenario.format) == "json" else self.to_csv()

    def write(self, path: str, fmt: str | None = None) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.render(fmt))


class ScenarioFailed(Exception):
    """Wraps a failure and carries the rows completed before it."""

    def __init__(self, cause: BaseException, partial: ConvergenceReport):
        super().__init__(str(cause))
        self.cause = cause
        self.partial = partial


def normalizer(s: Scenario) -> float:
    if s.experiment in ("forms", "affine-forms"):
        return s.b**s.m * ball_volume(s.m) * sphere_area(s.n)
    if s.experiment == "toral":
        return s.b**s.m * ball_volume(s.m)
    c = s.b * ball_volume(s.m) * sphere_area(s.n)
    return c / zeta(s.m + s.n) if s.primitive else c


def _dyadic_scales(log2T: int) -> list[float]:
    return [math.ldexp(1.0, j) for j in range(1, log2T + 1)]


def _toral_edges(N: int) -> list[int]:
    """Edges 1, 2^j + 1, ..., N + 1; rows report k <= edge - 1."""
    edges = [1]
    j = 1
    while 2**j < N:
        edges.append(2**j + 1)
        j += 1
    edges.append(N + 1)
    return edges


def _sample_forms(s: Scenario, i: int):
    system = sample_form(s.m, s.n, s.experiment == "affine-forms", SeededStream(s.seed, i), s.b)
    blocks = forms_shell_counts(system, [1.0] + _dyadic_scales(s.log2T), s.budget)
    return blocks.tolist()


def _sample_lattice(s: Scenario, i: int):
    stream = SeededStream(s.seed, i)
    rng = stream.rng()
    basis = sample_unimodular(s.m, s.n, rng)
    lat = AffineLattice(basis, rng.random(s.m + s.n)) if s.experiment == "affine-lattice" else basis
    return block_counts(lat, s.b, s.log2T, primitive_only=s.primitive, budget=s.budget)


def _sample_toral(s: Scenario, i: int):
    system = sample_toral(s.m, s.inhomogeneous, SeededStream(s.seed, i), s.b)
    return toral_shell_counts(system, _toral_edges(s.N)).tolist()


def _origami_counts(s: Scenario, surface: Origami, theta: float):
    """Counts at every dyadic scale from one enumeration at the largest scale."""
    T = math.ldexp(1.0, s.log2T)
    _, spectrum = count_saddle_connections(surface, s.b, T, theta, budget=s.budget)
    frame = ThinningRegion(s.b, 1, 1, 1.0, T, theta).frame()
    scales = _dyadic_scales(s.log2T)
    out = [0] * len(scales)
    for (a, c), mult in spectrum:
        y = 0.0 + frame[1, 0] * a + frame[1, 1] * c
        Y = y * y
        weight = 1 if s.distinct_holonomies else mult
        for j, sc in enumerate(scales):
            if Y < sc * sc:
                out[j] += weight
    return out


def _rows_from_cumulative(s: Scenario, sample: int, scales, counts, norm):
    rows = []
    for sc, cnt in zip(scales, counts):
        exp = norm * math.log(sc)
        rows.append(Row(s.experiment, s.seed, sample, s.m, s.n, s.b, float(sc), int(cnt), exp,
                        cnt / exp if exp > 0 else math.nan))
    return rows


def _slope(xs, ys) -> float:
    if len(xs) < 2:
        return math.nan
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    xm = x.mean()
    return float(((x - xm) * (y - y.mean())).sum() / ((x - xm) ** 2).sum())


def _summarize(report: ConvergenceReport, blocks: list, block_log: float):
    means = report.mean_counts()
    scales = list(means)
    norm = report.normalizer
    last = scales[-1]
    summary = {
        "samples": len({r.sample for r in report.rows}),
        "normalizer": norm,
        "final_scale": last,
        "final_mean_count": means[last],
        "final_expected": norm * math.log(last),
        "final_ratio": means[last] / (norm * math.log(last)),
    }
    top = scales[len(scales) // 2:]
    slope = _slope([math.log(sc) for sc in top], [means[sc] for sc in top])
    summary["slope"] = slope
    summary["slope_ratio"] = slope / norm
    if blocks:
        bm = math.fsum(blocks) / len(blocks)
        summary["block_mean"] = bm
        summary["block_expected"] = norm * block_log
        summary["block_ratio"] = bm / (norm * block_log)
    report.summary = summary


def run_scenario(s: Scenario) -> ConvergenceReport:
    """Run every sample, in parallel, and aggregate in sample order.

    On failure the rows finished so far are written to ``s.out`` (when set)
    and the error is re-raised wrapped in :class:`ScenarioFailed`.
    """
    norm = normalizer(s)
    report = ConvergenceReport(s, norm)
    blocks: list = []
    try:
        if s.experiment in ("forms", "affine-forms", "lattice", "affine-lattice"):
            fn = _sample_forms if "forms" in s.experiment else _sample_lattice
            scales = _dyadic_scales(s.log2T)
            for i, blk in enumerate(pmap(lambda i: fn(s, i), range(s.samples))):
                report.rows += _rows_from_cumulative(s, i, scales, np.cumsum(blk).tolist(), norm)
                blocks += blk
            block_log = math.log(2.0)
        elif s.experiment == "toral":
            edges = _toral_edges(s.N)
            scales = [e - 1 for e in edges[1:]]
            for i, blk in enumerate(pmap(lambda i: _sample_toral(s, i), range(s.samples))):
                report.rows += _rows_from_cumulative(s, i, scales, np.cumsum(blk).tolist(), norm)
                # full dyadic blocks (2^{j-1}, 2^j]; the first bin holds k = 1, 2
                full = [b for b, lo, hi in zip(blk, edges, edges[1:]) if lo > 1 and hi - lo == lo - 1]
                blocks += full
            block_log = math.log(2.0)
        elif s.experiment == "siegel":
            T = math.ldexp(1.0, s.log2T)
            region = ThinningRegion(s.b, 1, 1, 1.0, T)
            variant = "primitive" if s.primitive else "affine" if s.inhomogeneous else "plain"
            counts = siegel_counts(region, s.samples, variant, SeededStream(s.seed, 0), s.budget)
            exp = region_volume(region) / (zeta(2) if s.primitive else 1.0)
            report.rows = [Row(s.experiment, s.seed, i, 1, 1, s.b, T, int(c), exp, c / exp)
                           for i, c in enumerate(counts.tolist())]
            block_log = 0.0
        else:
            surface = s.load_origami()
            count = 1 if s.theta == "zero" else s.samples
            thetas = [0.0] if s.theta == "zero" else random_thetas(count, SeededStream(s.seed, 0))
            scales = _dyadic_scales(s.log2T)
            per = pmap(lambda th: _origami_counts(s, surface, th), thetas)
            T = scales[-1]
            sv = math.fsum(p[-1] for p in per) / len(per) / (2.0 * s.b * math.log(T))
            norm = 2.0 * s.b * sv
            report.normalizer = norm
            for i, cum in enumerate(per):
                report.rows += _rows_from_cumulative(s, i, scales, cum, norm)
                blocks += [cum[0]] + [hi - lo for lo, hi in zip(cum, cum[1:])]
            block_log = math.log(2.0)
    except Exception as exc:
        report.summary = {"status": f"failed: {type(exc).__name__}"}
        if s.out:
            report.write(s.out)
        raise ScenarioFailed(exc, report) from exc
    _summarize(report, blocks, block_log)
    if s.experiment == "origami":
        report.summary["sv_constant"] = report.normalizer / (2.0 * s.b)
    return report


@dataclass(frozen=True)
class Bracket:
    T: float
    lower: float
    upper: float
    ratio_lower: float
    ratio_upper: float


def interpolate_monotone(report: ConvergenceReport, T_query: float) -> Bracket:
    """Bracket the count at T_query between the recorded dyadic neighbours.

    The count is nondecreasing in T, so count(2^j) <= count(T) <= count(2^{j+1})
    for 2^j <= T < 2^{j+1}; dividing by normalizer * log T brackets the ratio.
    """
    means = report.mean_counts()
    scales = list(means)
    per_sample: dict = {}
    for r in report.rows:
        per_sample.setdefault(r.sample, []).append((r.scale, r.count))
    for seq in per_sample.values():
        seq.sort()
        if any(b[1] < a[1] for a, b in zip(seq, seq[1:])):
            raise AssertionError("counts are not monotone in the scale")
    if not (scales and scales[0] <= T_query <= scales[-1]) or T_query <= 1:
        raise ValidationError(f"T_query {T_query!r} outside the recorded range [{scales[0]}, {scales[-1]}]")
    denom = report.normalizer * math.log(T_query)
    if T_query in means:
        c = means[T_query]
        return Bracket(T_query, c, c, c / denom, c / denom)
    j = max(i for i, sc in enumerate(scales) if sc <= T_query)
    lo, hi = means[scales[j]], means[scales[j + 1]]
    return Bracket(T_query, lo, hi, lo / denom, hi / denom)
