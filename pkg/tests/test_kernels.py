"""The compiled kernels and their Python twins must return identical results."""

import numpy as np
import pytest

from ergocount import _backend, _pycore
from ergocount.lattice import _box, lll_transform
from ergocount.sampling import haar_x2_columns

pytestmark = pytest.mark.skipif(not _backend.COMPILED, reason="compiled extension not built")
core = _backend.kernels


@pytest.mark.parametrize("seed", range(20))
def test_scan_box(seed):
    rng = np.random.default_rng(seed)
    m, n = [(1, 1), (1, 2), (2, 1)][seed % 3]
    d = m + n
    M = np.eye(d)
    M[:m, m:] = -rng.random((m, n))
    M[:m] *= 2.0 ** (seed % 4)
    M[m:] /= 2.0 ** ((seed % 4) * m / n)
    U = lll_transform(M)
    off = rng.random(d) if seed % 2 else np.zeros(d)
    lo, hi = _box(M, U, off, np.array([2.0] * m + [4.0] * n))
    args = (M, U, off, lo, hi, m, n, 1.0, 1.0, 16.0, seed % 4 == 0)
    assert core.scan_box(*args) == _pycore.scan_box(*args)
    assert np.array_equal(core.collect_box(*args), _pycore.collect_box(*args))


@pytest.mark.parametrize("primitive", [False, True])
@pytest.mark.parametrize("affine", [False, True])
def test_count_d2_batch(primitive, affine):
    if primitive and affine:
        return
    rng = np.random.default_rng(7)
    bases = haar_x2_columns(rng, 300)
    offs = rng.random((300, 2)) if affine else np.zeros((300, 2))
    a = core.count_d2_batch(bases, offs, 1.0, 1.0, 16.0, 1.0, 4.0, primitive, 10**9)
    b = _pycore.count_d2_batch(bases, offs, 1.0, 1.0, 16.0, 1.0, 4.0, primitive, 10**9)
    assert np.array_equal(a, b)


def test_count_d2_batch_budget():
    bases = np.array([[[1.0, 0.0], [0.0, 1.0]]])
    out = core.count_d2_batch(bases, np.zeros((1, 2)), 1.0, 1.0, 2.0**40, 1.0, 2.0**20, False, 100)
    assert out.tolist() == [-1] == _pycore.count_d2_batch(bases, np.zeros((1, 2)), 1.0, 1.0, 2.0**40, 1.0,
                                                          2.0**20, False, 100).tolist()


@pytest.mark.parametrize("m,n", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_forms_blocks(m, n):
    rng = np.random.default_rng(m * 10 + n)
    for affine in (False, True):
        A = rng.random((m, n))
        w = rng.random(m) if affine else np.zeros(m)
        edges2 = np.array([1.0, 4.0, 16.0, 64.0, 256.0])
        for b in (0.3, 1.0, 3.0):
            assert np.array_equal(core.forms_blocks(A, w, b, edges2, 10**9), _pycore.forms_blocks(A, w, b, edges2, 10**9))
    assert core.forms_blocks(A, w, 1.0, edges2, 10) is None and _pycore.forms_blocks(A, w, 1.0, edges2, 10) is None


@pytest.mark.parametrize("m", [1, 2, 3])
def test_toral_blocks(m):
    rng = np.random.default_rng(m)
    alpha, target = rng.random(m), rng.random(m)
    edges = np.array([1, 2, 5, 17, 100, 3001])
    for b in (0.2, 0.5, 1.0):
        assert np.array_equal(core.toral_blocks(alpha, target, b, edges), _pycore.toral_blocks(alpha, target, b, edges))


def test_read_only_inputs():
    M = np.eye(2)
    M.setflags(write=False)
    U = np.eye(2, dtype=np.int64)
    U.setflags(write=False)
    assert core.scan_box(M, U, np.zeros(2), np.array([-1, -3]), np.array([1, 3]), 1, 1, 1.0, 1.0, 16.0, False) == 10
