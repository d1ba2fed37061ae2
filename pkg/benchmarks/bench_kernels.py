"""Time the compiled kernels against their pure-Python twins on identical inputs.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from ergocount import _backend
from ergocount import _pycore
from ergocount.lattice import _box, lll_transform
from ergocount.sampling import haar_x2_columns


def cases():
    rng = np.random.default_rng(12345)

    M = np.array([[1.0, 0.3, -0.2], [0.0, 1.0, 0.4], [0.0, 0.0, 1.0]])
    U = lll_transform(M)
    lo, hi = _box(M, U, np.zeros(3), np.array([3.0, 3.0, 16.0]))
    yield "scan_box d=3", "scan_box", (M, U, np.zeros(3), lo, hi, 2, 1, 4.0, 1.0, 256.0, False)

    bases = haar_x2_columns(rng, 500)
    offs = np.zeros((500, 2))
    yield "count_d2_batch 500", "count_d2_batch", (bases, offs, 1.0, 1.0, 4.0, 1.0, 2.0, False, 10**9)

    A = rng.random((1, 1))
    w = np.zeros(1)
    edges2 = np.array([4.0**j for j in range(13)])
    yield "forms_blocks T=2^12", "forms_blocks", (A, w, 1.0, edges2, 10**9)

    alpha = rng.random(2)
    yield "toral_blocks N=2e4", "toral_blocks", (alpha, np.zeros(2), 0.5, np.array([1, 20001]))


def timeit(fn, args, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _backend.COMPILED:
        print("compiled extension not available; only the Python kernels can be timed")
    print(f"{'kernel':<22}{'python [s]':>12}{'compiled [s]':>14}{'speedup':>10}  same")
    for label, name, kargs in cases():
        tp, op = timeit(getattr(_pycore, name), kargs, 1)
        if _backend.COMPILED:
            tc, oc = timeit(getattr(_backend.kernels, name), kargs, args.repeat)
            same = np.array_equal(np.asarray(op), np.asarray(oc))
            print(f"{label:<22}{tp:>12.4f}{tc:>14.5f}{tp / tc:>10.1f}  {same}")
        else:
            print(f"{label:<22}{tp:>12.4f}{'-':>14}{'-':>10}  -")


if __name__ == "__main__":
    main()
