import math

import numpy as np
import pytest

from ergocount.errors import ValidationError
from ergocount.sampling import (
    SeededStream,
    haar_x2_columns,
    in_fundamental_domain,
    sample_affine_offset,
    sample_form,
    sample_haar_x2,
    sample_toral,
    sample_unimodular,
)


def test_stream_reproducible():
    a = sample_form(2, 3, True, SeededStream(42, 7))
    b = sample_form(2, 3, True, SeededStream(42, 7))
    assert np.array_equal(a.A, b.A) and np.array_equal(a.w, b.w)


def test_streams_differ():
    draws = {SeededStream(1, i).rng().random() for i in range(50)}
    draws |= {SeededStream(2, i).rng().random() for i in range(50)}
    draws |= {SeededStream(1, 0).child(i).rng().random() for i in range(50)}
    assert len(draws) == 150


def test_stream_validation():
    with pytest.raises(ValidationError):
        SeededStream(-1)
    with pytest.raises(ValidationError):
        SeededStream(2**64)
    with pytest.raises(ValidationError):
        SeededStream(0, -1)


def test_homogeneous_form_has_zero_shift():
    assert not sample_form(1, 1, False, SeededStream(0)).w.any()
    assert not sample_toral(2, False, SeededStream(0)).target.any()


def test_uniform_means():
    rng = SeededStream(5).rng()
    A = np.stack([sample_form(1, 1, True, rng).A[0, 0] for _ in range(20000)])
    assert abs(A.mean() - 0.5) < 3 * math.sqrt(1 / 12 / A.size)
    basis = sample_haar_x2(SeededStream(5, 1))
    offs = np.stack([sample_affine_offset(basis, rng).offset_coeffs for _ in range(20000)])
    assert np.all(np.abs(offs.mean(0) - 0.5) < 3 * math.sqrt(1 / 12 / 20000))


def test_unit_determinant():
    cols = haar_x2_columns(np.random.default_rng(0), 10000)
    det = cols[:, 0, 0] * cols[:, 1, 1] - cols[:, 0, 1] * cols[:, 1, 0]
    assert np.max(np.abs(det - 1)) <= 1e-12


def test_unrotated_draws_lie_in_fundamental_domain():
    cols = haar_x2_columns(np.random.default_rng(1), 5000, rotate=False)
    from ergocount.geometry import UnimodularBasis

    assert all(in_fundamental_domain(UnimodularBasis(c, 1, 1)) for c in cols)


def test_shortest_vector_distribution():
    # Haar measure on X_2: P(shortest vector length^2 <= r) = (3/pi) r for r <= 1 (area of the cusp cut)
    cols = haar_x2_columns(np.random.default_rng(2), 200000, rotate=False)
    short2 = cols[:, 0, 0] ** 2
    for r in (0.25, 0.5, 0.9):
        p = float(np.mean(short2 <= r))
        expected = 3 / math.pi * r
        assert abs(p - expected) < 4 * math.sqrt(expected * (1 - expected) / short2.size)


def test_sample_unimodular():
    assert sample_unimodular(1, 1, SeededStream(0)).det() == pytest.approx(1.0, abs=1e-12)
    h = sample_unimodular(2, 1, SeededStream(0))
    assert h.det() == 1.0 and np.array_equal(h.columns[2], [0.0, 0.0, 1.0])
