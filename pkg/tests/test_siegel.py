import math

import mpmath
import numpy as np
import pytest

from ergocount.errors import ValidationError
from ergocount.regions import ThinningRegion, region_volume
from ergocount.sampling import SeededStream, haar_x2_columns
from ergocount.siegel import siegel_average, siegel_counts, siegel_target, zeta

UNIT = ThinningRegion(1.0, 1, 1, 1.0, 2.0)


@pytest.mark.parametrize("d", [2, 3, 4, 7, 12])
def test_zeta_against_mpmath(d):
    assert abs(zeta(d) - float(mpmath.zeta(d))) < 1e-12


def test_zeta_values_and_monotonicity():
    assert zeta(2) == pytest.approx(math.pi**2 / 6, abs=1e-13)
    assert zeta(3) == pytest.approx(1.2020569031595942, abs=1e-13)
    vals = [zeta(d) for d in range(2, 40)]
    assert all(a > b for a, b in zip(vals, vals[1:])) and vals[-1] - 1 < 1e-11
    with pytest.raises(ValidationError):
        zeta(1)
    with pytest.raises(ValidationError):
        zeta(2.5)


def test_unsupported_dimension():
    with pytest.raises(ValidationError, match="dimension 2"):
        siegel_average(ThinningRegion(1.0, 1, 2), 1000, "plain", SeededStream(0))
    with pytest.raises(ValidationError):
        siegel_average(UNIT, 50, "plain", SeededStream(0))
    with pytest.raises(ValidationError):
        siegel_average(UNIT, 1000, "other", SeededStream(0))


@pytest.mark.parametrize("variant", ["plain", "affine", "primitive"])
def test_small_run_matches_target(variant):
    est = siegel_average(UNIT, 20000, variant, SeededStream(3, 0))
    assert est.within(siegel_target(UNIT, variant), 4)


def test_deterministic_and_thread_independent(monkeypatch):
    a = siegel_counts(UNIT, 9000, "affine", SeededStream(9, 0))
    monkeypatch.setenv("ERGOCOUNT_THREADS", "1")
    b = siegel_counts(UNIT, 9000, "affine", SeededStream(9, 0))
    assert np.array_equal(a, b)


def test_tiny_region():
    region = ThinningRegion(1e-4, 1, 1, 1.0, 2.0)
    est = siegel_average(region, 5000, "plain", SeededStream(1))
    assert est.mean <= region_volume(region) + 3 * est.stderr


def test_plain_and_affine_agree():
    p = siegel_average(UNIT, 40000, "plain", SeededStream(4, 0))
    a = siegel_average(UNIT, 40000, "affine", SeededStream(4, 1))
    assert abs(p.mean - a.mean) <= 3 * math.hypot(p.stderr, a.stderr)


def test_primitive_fraction():
    stream = SeededStream(6, 0)
    plain = siegel_counts(UNIT, 40000, "plain", stream)
    prim = siegel_counts(UNIT, 40000, "primitive", stream)
    # same lattices: the ratio of means is a ratio estimator, delta-method stderr
    r = prim.mean() / plain.mean()
    resid = prim - r * plain
    se = resid.std(ddof=1) / math.sqrt(plain.size) / plain.mean()
    assert abs(r - 1 / zeta(2)) <= 3 * se


def test_stderr_scaling():
    a = siegel_average(UNIT, 20000, "plain", SeededStream(8, 0))
    b = siegel_average(UNIT, 40000, "plain", SeededStream(8, 1))
    assert 0.6 <= b.stderr / a.stderr <= 0.85


@pytest.mark.parametrize("theta", [0.0, 0.7])
@pytest.mark.parametrize("variant", ["plain", "primitive", "affine"])
def test_blocked_counts_equal_single_box(kernels, theta, variant):
    # long regions are counted block by block; the sum must equal one big enumeration
    region = ThinningRegion(0.5, 1, 1, 1.5, 40.0, theta)
    stream = SeededStream(3, 1)
    got = siegel_counts(region, 300, variant, stream)
    rng = stream.child(0).rng()
    cols = haar_x2_columns(rng, 300)
    offs = rng.random((300, 2)) if variant == "affine" else np.zeros((300, 2))
    if theta:
        cols = np.ascontiguousarray(region.frame() @ cols)
    ref = kernels.count_d2_batch(cols, offs, 0.25, 2.25, 1600.0, region.x_radius(), 40.0,
                                 variant == "primitive", 10**9)
    assert np.array_equal(got, ref)
