# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled counting kernels.

Every routine here has a line-for-line twin in ``_pycore.py``; both must
produce identical integers on identical inputs (same operation order, no
FMA contraction, see setup.py).
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor, ceil, sqrt, pow, fabs

cnp.import_array()

DEF MAXD = 8


cdef inline long _gcd(long a, long b) nogil:
    cdef long t
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b != 0:
        t = a % b
        a = b
        b = t
    return a


cdef inline bint _member(double X, double Y, int m, int n, double b2, double ylo2, double yhi2) nogil:
    cdef double p = 1.0
    cdef int i
    if Y < ylo2 or Y >= yhi2:
        return 0
    for i in range(m):
        p *= X
    for i in range(n):
        p *= Y
    return p <= b2


cdef long _scan(const double[:, ::1] M, const long[:, ::1] U, const double[::1] off,
                const long[::1] lo, const long[::1] hi, int m, int n,
                double b2, double ylo2, double yhi2, bint primitive,
                long[:, ::1] out) nogil:
    """Scan k' over the box, map k = U k', test M (k + off); optionally record k."""
    cdef int d = m + n
    cdef long kp[MAXD]
    cdef long k[MAXD]
    cdef double c[MAXD]
    cdef int i, j
    cdef long count = 0, g
    cdef double s, X, Y
    cdef bint record = out.shape[0] > 0
    for i in range(d):
        if lo[i] > hi[i]:
            return 0
        kp[i] = lo[i]
    while True:
        for i in range(d):
            k[i] = 0
            for j in range(d):
                k[i] += U[i, j] * kp[j]
            c[i] = <double>k[i] + off[i]
        X = 0.0
        Y = 0.0
        for i in range(d):
            s = 0.0
            for j in range(d):
                s += M[i, j] * c[j]
            if i < m:
                X += s * s
            else:
                Y += s * s
        if _member(X, Y, m, n, b2, ylo2, yhi2):
            if primitive:
                g = 0
                for i in range(d):
                    g = _gcd(g, k[i])
            else:
                g = 1
            if g == 1:
                if record:
                    for i in range(d):
                        out[count, i] = k[i]
                count += 1
        # odometer, last coordinate fastest
        i = d - 1
        while i >= 0:
            kp[i] += 1
            if kp[i] <= hi[i]:
                break
            kp[i] = lo[i]
            i -= 1
        if i < 0:
            break
    return count


def scan_box(const double[:, ::1] M, const long[:, ::1] U, const double[::1] off, const long[::1] lo, const long[::1] hi,
             int m, int n, double b2, double ylo2, double yhi2, bint primitive):
    """Count points M (U k' + off) in the region for k' in [lo, hi]."""
    cdef long[:, ::1] none = np.empty((0, m + n), dtype=np.int64)
    cdef long r
    if m + n > MAXD:
        raise ValueError("dimension too large for the compiled kernel")
    with nogil:
        r = _scan(M, U, off, lo, hi, m, n, b2, ylo2, yhi2, primitive, none)
    return r


def collect_box(const double[:, ::1] M, const long[:, ::1] U, const double[::1] off, const long[::1] lo, const long[::1] hi,
                int m, int n, double b2, double ylo2, double yhi2, bint primitive):
    """Integer coefficients k (in the original basis) of the points found by scan_box."""
    cdef long cnt = scan_box(M, U, off, lo, hi, m, n, b2, ylo2, yhi2, primitive)
    out = np.empty((cnt, m + n), dtype=np.int64)
    cdef long[:, ::1] view = out
    if cnt:
        with nogil:
            _scan(M, U, off, lo, hi, m, n, b2, ylo2, yhi2, primitive, view)
    return out


cdef inline double _round_half_even(double x) nogil:
    cdef double r = floor(x + 0.5)
    if r - x == 0.5 and (<long>r) % 2 != 0:
        r -= 1.0
    return r


def count_d2_batch(const double[:, :, ::1] bases, const double[:, ::1] offsets, double b2, double ylo2,
                   double yhi2, double xr, double yr, bint primitive, long budget):
    """Per-sample counts for 2-dimensional (affine) lattices, reduction included.

    Returns an int64 array; an entry of -1 marks a sample whose scan box
    exceeded ``budget``.
    """
    cdef Py_ssize_t S = bases.shape[0], s
    out = np.zeros(S, dtype=np.int64)
    cdef long[::1] res = out
    cdef double[:, ::1] M = np.empty((2, 2))
    cdef long[:, ::1] U = np.empty((2, 2), dtype=np.int64)
    cdef double[::1] off = np.empty(2)
    cdef long[::1] lo = np.empty(2, dtype=np.int64)
    cdef long[::1] hi = np.empty(2, dtype=np.int64)
    cdef long[:, ::1] none = np.empty((0, 2), dtype=np.int64)
    cdef double a0, a1, c0, c1, t0, t1, n1, n2, mu, r, det, R0, R1, s0, s1, e0, e1, e2, e3, half0, half1
    cdef long u00, u01, u10, u11, tu0, tu1, ri, iters, du
    cdef int i, j
    with nogil:
        for s in range(S):
            # columns of the basis
            a0 = bases[s, 0, 0]; a1 = bases[s, 1, 0]
            c0 = bases[s, 0, 1]; c1 = bases[s, 1, 1]
            u00 = 1; u01 = 0; u10 = 0; u11 = 1
            iters = 0
            while iters < 10000:
                iters += 1
                n1 = a0 * a0 + a1 * a1
                n2 = c0 * c0 + c1 * c1
                if n2 < n1:
                    t0 = a0; t1 = a1; a0 = c0; a1 = c1; c0 = t0; c1 = t1
                    tu0 = u00; tu1 = u10; u00 = u01; u10 = u11; u01 = tu0; u11 = tu1
                    n1 = n2
                mu = (a0 * c0 + a1 * c1) / n1
                if fabs(mu) <= 0.5:
                    break
                r = _round_half_even(mu)
                ri = <long>r
                c0 = c0 - r * a0
                c1 = c1 - r * a1
                u01 = u01 - ri * u00
                u11 = u11 - ri * u10
            for i in range(2):
                for j in range(2):
                    M[i, j] = bases[s, i, j]
            # reduced basis recomputed from the integer transform
            e0 = M[0, 0] * u00 + M[0, 1] * u10
            e1 = M[1, 0] * u00 + M[1, 1] * u10
            e2 = M[0, 0] * u01 + M[0, 1] * u11
            e3 = M[1, 0] * u01 + M[1, 1] * u11
            det = e0 * e3 - e2 * e1
            # rows of the inverse: [e3, -e2] / det, [-e1, e0] / det
            R0 = (fabs(e3) * xr + fabs(e2) * yr) / fabs(det)
            R1 = (fabs(e1) * xr + fabs(e0) * yr) / fabs(det)
            du = u00 * u11 - u01 * u10
            off[0] = offsets[s, 0]
            off[1] = offsets[s, 1]
            # s = U^{-1} off
            s0 = (u11 * off[0] - u01 * off[1]) / du
            s1 = (-u10 * off[0] + u00 * off[1]) / du
            half0 = R0 * (1.0 + 1e-9) + 1e-9
            half1 = R1 * (1.0 + 1e-9) + 1e-9
            lo[0] = <long>ceil(-half0 - s0)
            hi[0] = <long>floor(half0 - s0)
            lo[1] = <long>ceil(-half1 - s1)
            hi[1] = <long>floor(half1 - s1)
            if (hi[0] - lo[0] + 1) * (hi[1] - lo[1] + 1) > budget:
                res[s] = -1
                continue
            U[0, 0] = u00; U[0, 1] = u01; U[1, 0] = u10; U[1, 1] = u11
            res[s] = _scan(M, U, off, lo, hi, 1, 1, b2, ylo2, yhi2, primitive, none)
    return out


cdef inline int _bin(const double[::1] edges2, double Q) nogil:
    cdef int lo = 0, hi = edges2.shape[0] - 1, mid
    # invariant: edges2[lo] <= Q < edges2[hi]
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if edges2[mid] <= Q:
            lo = mid
        else:
            hi = mid
    return lo


cdef inline bint all_ordered(long* lo, long* hi, int m) nogil:
    cdef int i
    for i in range(m):
        if lo[i] > hi[i]:
            return 0
    return 1


def forms_blocks(const double[:, ::1] A, const double[::1] w, double b, const double[::1] edges2, long budget):
    """Counts of (p, q) with |Aq - p - w| <= b |q|^{-n/m}, binned by |q|^2 into [edges2[i], edges2[i+1])."""
    cdef int m = A.shape[0], n = A.shape[1]
    cdef int nb = edges2.shape[0] - 1
    out = np.zeros(nb, dtype=np.int64)
    cdef long[::1] res = out
    cdef double Qmin = edges2[0], Qmax = edges2[nb]
    cdef long R = <long>floor(sqrt(Qmax))
    cdef long q[MAXD]
    cdef long p[MAXD]
    cdef long plo[MAXD]
    cdef long phi[MAXD]
    cdef double z[MAXD]
    cdef double b2 = b * b, b2m = 1.0, Q, Qn, s, rad, D, t
    cdef int i, l
    cdef long side = 2 * R + 1, total = 1
    if m > MAXD or n > MAXD:
        raise ValueError("dimension too large for the compiled kernel")
    if nb <= 0:
        return out
    for i in range(n):
        total *= side
        if total > budget:
            return None
    for i in range(m):
        b2m *= b2
    with nogil:
        for i in range(n):
            q[i] = -R
        while True:
            Q = 0.0
            for i in range(n):
                Q += <double>(q[i] * q[i])
            if Q >= Qmin and Q < Qmax:
                for i in range(m):
                    s = 0.0
                    for l in range(n):
                        s += A[i, l] * <double>q[l]
                    z[i] = s - w[i]
                Qn = 1.0
                for i in range(n):
                    Qn *= Q
                if m == 1 and 4.0 * b2 < Qn:
                    # radius below 1/2: only the nearest integer can qualify
                    plo[0] = <long>_round_half_even(z[0])
                    phi[0] = plo[0]
                    p[0] = plo[0]
                else:
                    rad = b * pow(Q, -0.5 * n / m)
                    rad = rad * (1.0 + 1e-12) + 1e-12
                    for i in range(m):
                        plo[i] = <long>ceil(z[i] - rad)
                        phi[i] = <long>floor(z[i] + rad)
                        p[i] = plo[i]
                if all_ordered(plo, phi, m):
                    while True:
                        D = 0.0
                        for i in range(m):
                            t = z[i] - <double>p[i]
                            D += t * t
                        t = 1.0
                        for i in range(m):
                            t *= D
                        for i in range(n):
                            t *= Q
                        if t <= b2m:
                            res[_bin(edges2, Q)] += 1
                        i = m - 1
                        while i >= 0:
                            p[i] += 1
                            if p[i] <= phi[i]:
                                break
                            p[i] = plo[i]
                            i -= 1
                        if i < 0:
                            break
            i = n - 1
            while i >= 0:
                q[i] += 1
                if q[i] <= R:
                    break
                q[i] = -R
                i -= 1
            if i < 0:
                break
    return out


def toral_blocks(const double[::1] alpha, const double[::1] target, double b, const long[::1] edges):
    """Counts of 1 <= k <= N with |k alpha - target|_Z < b k^{-1/m}, binned by k into [edges[i], edges[i+1])."""
    cdef int m = alpha.shape[0]
    cdef int nb = edges.shape[0] - 1
    out = np.zeros(nb, dtype=np.int64)
    cdef long[::1] res = out
    cdef double x[MAXD]
    cdef double a[MAXD]
    cdef double b2m = 1.0, D, t, kk
    cdef long k, N, first
    cdef int i, bi
    if m > MAXD:
        raise ValueError("dimension too large for the compiled kernel")
    if nb <= 0:
        return out
    N = edges[nb] - 1
    first = edges[0]
    for i in range(m):
        b2m *= b * b
    with nogil:
        for i in range(m):
            a[i] = alpha[i] - floor(alpha[i])
            x[i] = 0.0
        bi = 0
        for k in range(1, N + 1):
            for i in range(m):
                x[i] = x[i] + a[i]
                x[i] = x[i] - floor(x[i])
            if k < first:
                continue
            D = 0.0
            for i in range(m):
                t = x[i] - target[i]
                t = t - floor(t + 0.5)
                D += t * t
            t = 1.0
            for i in range(m):
                t *= D
            kk = <double>k
            if t * kk * kk < b2m:
                while edges[bi + 1] <= k:
                    bi += 1
                res[bi] += 1
    return out
