"""Pure-Python twins of the compiled kernels in ``_core.pyx``.

Same signatures, same operation order, same results. Used when the extension
is not built, or when ``ERGOCOUNT_PURE=1`` is set.
"""

from math import ceil, floor, gcd, pow, sqrt

import numpy as np


def _member(X, Y, m, n, b2, ylo2, yhi2):
    if Y < ylo2 or Y >= yhi2:
        return False
    p = 1.0
    for _ in range(m):
        p *= X
    for _ in range(n):
        p *= Y
    return p <= b2


def _scan(M, U, off, lo, hi, m, n, b2, ylo2, yhi2, primitive, record):
    d = m + n
    M = [[float(M[i][j]) for j in range(d)] for i in range(d)]
    U = [[int(U[i][j]) for j in range(d)] for i in range(d)]
    off = [float(o) for o in off]
    lo = [int(v) for v in lo]
    hi = [int(v) for v in hi]
    found = []
    count = 0
    if any(lo[i] > hi[i] for i in range(d)):
        return 0, found
    kp = list(lo)
    rng = range(d)
    while True:
        k = [sum(U[i][j] * kp[j] for j in rng) for i in rng]
        c = [k[i] + off[i] for i in rng]
        X = 0.0
        Y = 0.0
        for i in rng:
            s = 0.0
            row = M[i]
            for j in rng:
                s += row[j] * c[j]
            if i < m:
                X += s * s
            else:
                Y += s * s
        if _member(X, Y, m, n, b2, ylo2, yhi2):
            g = 0
            if primitive:
                for v in k:
                    g = gcd(g, v)
            else:
                g = 1
            if g == 1:
                if record:
                    found.append(k)
                count += 1
        i = d - 1
        while i >= 0:
            kp[i] += 1
            if kp[i] <= hi[i]:
                break
            kp[i] = lo[i]
            i -= 1
        if i < 0:
            break
    return count, found


def scan_box(M, U, off, lo, hi, m, n, b2, ylo2, yhi2, primitive):
    return _scan(M, U, off, lo, hi, m, n, b2, ylo2, yhi2, primitive, False)[0]


def collect_box(M, U, off, lo, hi, m, n, b2, ylo2, yhi2, primitive):
    _, found = _scan(M, U, off, lo, hi, m, n, b2, ylo2, yhi2, primitive, True)
    return np.array(found, dtype=np.int64).reshape(len(found), m + n)


def _round_half_even(x):
    r = float(floor(x + 0.5))
    if r - x == 0.5 and int(r) % 2 != 0:
        r -= 1.0
    return r


def count_d2_batch(bases, offsets, b2, ylo2, yhi2, xr, yr, primitive, budget):
    S = bases.shape[0]
    out = np.zeros(S, dtype=np.int64)
    for s in range(S):
        a0, a1 = float(bases[s, 0, 0]), float(bases[s, 1, 0])
        c0, c1 = float(bases[s, 0, 1]), float(bases[s, 1, 1])
        u00, u01, u10, u11 = 1, 0, 0, 1
        iters = 0
        while iters < 10000:
            iters += 1
            n1 = a0 * a0 + a1 * a1
            n2 = c0 * c0 + c1 * c1
            if n2 < n1:
                a0, a1, c0, c1 = c0, c1, a0, a1
                u00, u10, u01, u11 = u01, u11, u00, u10
                n1 = n2
            mu = (a0 * c0 + a1 * c1) / n1
            if abs(mu) <= 0.5:
                break
            r = _round_half_even(mu)
            ri = int(r)
            c0 = c0 - r * a0
            c1 = c1 - r * a1
            u01 = u01 - ri * u00
            u11 = u11 - ri * u10
        M = [[float(bases[s, i, j]) for j in range(2)] for i in range(2)]
        e0 = M[0][0] * u00 + M[0][1] * u10
        e1 = M[1][0] * u00 + M[1][1] * u10
        e2 = M[0][0] * u01 + M[0][1] * u11
        e3 = M[1][0] * u01 + M[1][1] * u11
        det = e0 * e3 - e2 * e1
        R0 = (abs(e3) * xr + abs(e2) * yr) / abs(det)
        R1 = (abs(e1) * xr + abs(e0) * yr) / abs(det)
        du = u00 * u11 - u01 * u10
        off = [float(offsets[s, 0]), float(offsets[s, 1])]
        s0 = (u11 * off[0] - u01 * off[1]) / du
        s1 = (-u10 * off[0] + u00 * off[1]) / du
        half0 = R0 * (1.0 + 1e-9) + 1e-9
        half1 = R1 * (1.0 + 1e-9) + 1e-9
        lo = [ceil(-half0 - s0), ceil(-half1 - s1)]
        hi = [floor(half0 - s0), floor(half1 - s1)]
        if (hi[0] - lo[0] + 1) * (hi[1] - lo[1] + 1) > budget:
            out[s] = -1
            continue
        U = [[u00, u01], [u10, u11]]
        out[s] = _scan(M, U, off, lo, hi, 1, 1, b2, ylo2, yhi2, primitive, False)[0]
    return out


def _bin(edges2, Q):
    lo, hi = 0, len(edges2) - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if edges2[mid] <= Q:
            lo = mid
        else:
            hi = mid
    return lo


def forms_blocks(A, w, b, edges2, budget):
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    A = A.tolist()
    w = [float(v) for v in w]
    edges2 = [float(e) for e in edges2]
    nb = len(edges2) - 1
    out = np.zeros(max(nb, 0), dtype=np.int64)
    if nb <= 0:
        return out
    Qmin, Qmax = edges2[0], edges2[nb]
    R = int(floor(sqrt(Qmax)))
    if (2 * R + 1) ** n > budget:
        return None
    b2 = b * b
    b2m = 1.0
    for _ in range(m):
        b2m *= b2
    q = [-R] * n
    while True:
        Q = 0.0
        for i in range(n):
            Q += float(q[i] * q[i])
        if Qmin <= Q < Qmax:
            z = []
            for i in range(m):
                s = 0.0
                for l in range(n):
                    s += A[i][l] * float(q[l])
                z.append(s - w[i])
            Qn = 1.0
            for _ in range(n):
                Qn *= Q
            if m == 1 and 4.0 * b2 < Qn:
                plo = [int(_round_half_even(z[0]))]
                phi = list(plo)
            else:
                rad = b * pow(Q, -0.5 * n / m)
                rad = rad * (1.0 + 1e-12) + 1e-12
                plo = [ceil(z[i] - rad) for i in range(m)]
                phi = [floor(z[i] + rad) for i in range(m)]
            if all(plo[i] <= phi[i] for i in range(m)):
                p = list(plo)
                while True:
                    D = 0.0
                    for i in range(m):
                        t = z[i] - float(p[i])
                        D += t * t
                    t = 1.0
                    for _ in range(m):
                        t *= D
                    for _ in range(n):
                        t *= Q
                    if t <= b2m:
                        out[_bin(edges2, Q)] += 1
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


def toral_blocks(alpha, target, b, edges):
    alpha = [float(a) for a in alpha]
    target = [float(t) for t in target]
    edges = [int(e) for e in edges]
    m = len(alpha)
    nb = len(edges) - 1
    out = np.zeros(max(nb, 0), dtype=np.int64)
    if nb <= 0:
        return out
    N = edges[nb] - 1
    first = edges[0]
    b2m = 1.0
    for _ in range(m):
        b2m *= b * b
    a = [alpha[i] - floor(alpha[i]) for i in range(m)]
    x = [0.0] * m
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
        for _ in range(m):
            t *= D
        kk = float(k)
        if t * kk * kk < b2m:
            while edges[bi + 1] <= k:
                bi += 1
            out[bi] += 1
    return out
