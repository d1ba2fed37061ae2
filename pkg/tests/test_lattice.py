import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ergocount.errors import BudgetExceeded, ValidationError
from ergocount.geometry import AffineLattice, UnimodularBasis, apply_dyadic_flow, shear_matrix
from ergocount.lattice import (
    CountRequest,
    birkhoff_counts,
    block_counts,
    count_points,
    enumerate_points,
    lll_transform,
    reduce_basis,
)
from ergocount.regions import ThinningRegion, dyadic_block
from ergocount.sampling import SeededStream, sample_haar_x2, sample_unimodular

import oracles

Z2 = UnimodularBasis.identity(1, 1)


def _pts(points):
    return sorted(tuple(float(c) for c in p.coords) for p in points)


def test_z2_fixture(kernels):
    region = ThinningRegion(1.0, 1, 1, 1.0, 4.0)
    exact = oracles.lattice_points(np.eye(2), [0, 0], 1, 1, 1, 1, 4, 4)
    assert len(exact) == 10
    for strategy in ("direct", "dyadic"):
        assert count_points(Z2, region, strategy=strategy) == 10
        assert count_points(Z2, region, primitive_only=True, strategy=strategy) == 6
    assert _pts(enumerate_points(Z2, region)) == sorted(tuple(float(c) for c in p) for p in exact)


def test_diagonal_fixture(kernels):
    basis = UnimodularBasis(np.diag([2.0, 0.5]), 1, 1)
    region = ThinningRegion(0.1, 1, 1, 1.0, 2.0)
    exact = oracles.lattice_points([[2, 0], [0, F(1, 2)]], [0, 0], F(1, 10), 1, 1, 1, 2, 5)
    assert sorted(exact) == [(0, -F(3, 2)), (0, -1), (0, 1), (0, F(3, 2))]
    assert _pts(enumerate_points(basis, region)) == [(0.0, -1.5), (0.0, -1.0), (0.0, 1.0), (0.0, 1.5)]


def test_affine_fixture(kernels):
    lat = AffineLattice(Z2, [0.5, 0.5])
    region = ThinningRegion(1.0, 1, 1, 1.0, 2.0)
    exact = oracles.lattice_points(np.eye(2), [F(1, 2), F(1, 2)], 1, 1, 1, 1, 2, 3)
    assert len(exact) == 4
    assert _pts(enumerate_points(lat, region)) == [(-0.5, -1.5), (-0.5, 1.5), (0.5, -1.5), (0.5, 1.5)]
    assert count_points(lat, region, strategy="dyadic") == 4


def test_birkhoff_examples(kernels):
    assert birkhoff_counts(Z2, 1.0, 0) == []
    assert birkhoff_counts(Z2, 1.0, 2) == [6, 10]
    assert birkhoff_counts(AffineLattice(Z2, [0.5, 0.5]), 1.0, 2) == [4, 4]


def test_empty_shell():
    assert count_points(Z2, ThinningRegion(1.0, 1, 1, 2.0, 2.0)) == 0
    assert enumerate_points(Z2, ThinningRegion(1.0, 1, 1, 2.0, 2.0)) == []


def test_reduce_examples():
    assert np.array_equal(reduce_basis(Z2).columns, np.eye(2))
    red = reduce_basis(UnimodularBasis(np.array([[2.0, -1.0], [0.0, 0.5]]), 1, 1))
    cols = {tuple(c) for c in red.columns.T.tolist()}
    assert cols == {(0.0, 1.0), (-1.0, 0.5)}


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4))
def test_lll_transform_is_unimodular_and_reduces(seed, d):
    rng = np.random.default_rng(seed)
    M = np.eye(d) + np.triu(rng.integers(-20, 20, (d, d)), 1) * rng.random()
    U = lll_transform(M)
    assert abs(round(np.linalg.det(U.astype(float)))) == 1
    B = M @ U
    # size reduction: Gram-Schmidt coefficients at most 1/2
    Q, R = np.linalg.qr(B)
    for i in range(d):
        for j in range(i):
            assert abs(R[j, i] / R[j, j]) <= 0.5 + 1e-9


def test_count_request():
    req = CountRequest(Z2, ThinningRegion(1.0, 1, 1, 1.0, 4.0), primitive_only=True)
    assert req.count() == 6
    with pytest.raises(ValidationError):
        CountRequest(AffineLattice(Z2, [0.5, 0.0]), req.region, primitive_only=True)
    with pytest.raises(ValidationError):
        CountRequest(Z2, ThinningRegion(1.0, 1, 2), False)
    with pytest.raises(ValidationError):
        CountRequest(Z2, req.region, strategy="magic")


def test_budget():
    with pytest.raises(BudgetExceeded, match="use dyadic strategy"):
        count_points(Z2, ThinningRegion(1.0, 1, 1, 1.0, 2.0**20), strategy="direct", budget=1000)


def _random_lattice(seed, d, affine):
    m = 1
    n = d - 1
    rng = np.random.default_rng(seed)
    basis = sample_unimodular(m, n, SeededStream(seed, 0)) if d == 2 else shear_matrix(rng.random((m, n)))
    return AffineLattice(basis, rng.random(d)) if affine else basis


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3]), st.booleans(), st.sampled_from([0.5, 1.0, 2.0]))
def test_direct_equals_dyadic(seed, d, affine, b):
    lat = _random_lattice(seed, d, affine)
    region = ThinningRegion(b, 1, d - 1, 1.0, 2.0**6)
    assert count_points(lat, region, strategy="direct") == count_points(lat, region, strategy="dyadic")


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_reduction_invariance(seed):
    rng = np.random.default_rng(seed)
    basis = sample_haar_x2(SeededStream(seed, 1))
    flowed = apply_dyadic_flow(basis, 5)
    # the same lattice in a skewed basis
    V = np.array([[1, int(rng.integers(-5, 5))], [0, 1]]) @ np.array([[1, 0], [int(rng.integers(-5, 5)), 1]])
    other = UnimodularBasis(flowed.columns @ V, 1, 1)
    region = ThinningRegion(1.0, 1, 1, 1.0, 8.0)
    assert count_points(flowed, region) == count_points(other, region)
    assert count_points(flowed, region) == count_points(reduce_basis(flowed), region)


def test_reduction_invariance_on_flowed_bases():
    for seed in range(100):
        basis = apply_dyadic_flow(sample_haar_x2(SeededStream(seed, 2)), seed % 7)
        region = ThinningRegion(1.0, 1, 1, 1.0, 4.0)
        assert count_points(basis, region) == count_points(reduce_basis(basis), region)


def test_flow_equivariance_of_blocks():
    for seed in range(10):
        lat = _random_lattice(seed, 3, seed % 2 == 1)
        for j in range(6):
            lhs = count_points(lat, dyadic_block(1.0, 1, 2, j))
            rhs = count_points(apply_dyadic_flow(lat, j), dyadic_block(1.0, 1, 2, 0))
            assert lhs == rhs
        assert block_counts(lat, 1.0, 6) == [count_points(lat, dyadic_block(1.0, 1, 2, j)) for j in range(6)]


def test_monotone_in_b_and_shell():
    for seed in range(10):
        lat = _random_lattice(seed, 2, False)
        counts_b = [count_points(lat, ThinningRegion(b, 1, 1, 1.0, 64.0)) for b in (0.25, 0.5, 1.0, 2.0)]
        counts_T = [count_points(lat, ThinningRegion(1.0, 1, 1, 1.0, T)) for T in (2.0, 8.0, 32.0, 128.0)]
        assert counts_b == sorted(counts_b) and counts_T == sorted(counts_T)


def test_rotated_region_against_brute_force():
    rng = np.random.default_rng(8)
    for _ in range(5):
        theta = float(rng.random() * 2 * math.pi)
        region = ThinningRegion(1.0, 1, 1, 1.0, 16.0, theta)
        brute = oracles.rotated_primitive_upper(theta, 1.0, 16.0, 20)
        # the region has both signs of y'; primitive points come in +- pairs
        assert count_points(Z2, region, primitive_only=True) == 2 * len(brute)


def test_random_rational_lattices_against_exact_oracle(kernels):
    rng = np.random.default_rng(4)
    for _ in range(6):
        a = F(int(rng.integers(0, 16)), 16)
        cols = [[1, -a], [0, 1]]
        off = [F(int(rng.integers(0, 8)), 8), F(int(rng.integers(0, 8)), 8)]
        exact = oracles.lattice_points(cols, off, 1, 1, 1, 1, 8, 12)
        lat = AffineLattice(UnimodularBasis(np.array(cols, dtype=float), 1, 1), [float(o) for o in off])
        assert count_points(lat, ThinningRegion(1.0, 1, 1, 1.0, 8.0)) == len(exact)
