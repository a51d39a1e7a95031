"""numba kernels: closest-point projection, action gradient, homotopy area.

Surfaces enter as ``(kind, a, b, c, tube)`` with kind 0 = round sphere of
radius ``a`` and kind 1 = axis-aligned ellipsoid with semi-axes ``a, b, c``.
Status codes: 0 ok, 1 point outside the tube, 2 degenerate point.
"""
import math

import numpy as np
from numba import njit


@njit(cache=True)
def _proj1(y0, y1, y2, kind, a, b, c, tube):
    ny = math.sqrt(y0 * y0 + y1 * y1 + y2 * y2)
    if kind == 0:
        if ny < 1e-12 * a:
            return 0.0, 0.0, 0.0, ny, 2
        s = a / ny
        status = 0
        if abs(ny - a) > tube:
            status = 1
        return s * y0, s * y1, s * y2, ny, status

    a2 = a * a
    b2 = b * b
    c2 = c * c
    amin2 = min(a2, min(b2, c2))
    amax = math.sqrt(max(a2, max(b2, c2)))
    if ny < 1e-12 * math.sqrt(amin2):
        return 0.0, 0.0, 0.0, 0.0, 2
    lo = -amin2
    hi = ny * amax
    t = 0.0
    if t <= lo or t >= hi:
        t = 0.5 * (lo + hi)
    for _ in range(200):
        p0 = a * y0 / (a2 + t)
        p1 = b * y1 / (b2 + t)
        p2 = c * y2 / (c2 + t)
        f = p0 * p0 + p1 * p1 + p2 * p2 - 1.0
        df = -2.0 * (p0 * p0 / (a2 + t) + p1 * p1 / (b2 + t) + p2 * p2 / (c2 + t))
        if f > 0.0:
            lo = t
        else:
            hi = t
        tn = t - f / df
        if not (lo < tn < hi):
            tn = 0.5 * (lo + hi)
        if abs(tn - t) <= 1e-15 * (1.0 + abs(t)):
            t = tn
            break
        t = tn
    if t + amin2 < 1e-12 * amin2:
        return 0.0, 0.0, 0.0, t, 2
    x0 = a2 * y0 / (a2 + t)
    x1 = b2 * y1 / (b2 + t)
    x2 = c2 * y2 / (c2 + t)
    d = math.sqrt((x0 - y0) ** 2 + (x1 - y1) ** 2 + (x2 - y2) ** 2)
    status = 0
    if d > tube:
        status = 1
    return x0, x1, x2, t, status


@njit(cache=True)
def _normal1(x0, x1, x2, kind, a, b, c):
    if kind == 0:
        m0, m1, m2 = x0, x1, x2
    else:
        m0, m1, m2 = x0 / (a * a), x1 / (b * b), x2 / (c * c)
    nm = math.sqrt(m0 * m0 + m1 * m1 + m2 * m2)
    return m0 / nm, m1 / nm, m2 / nm


@njit(cache=True)
def _dproj1(kind, a, b, c, x0, x1, x2, t, y0, y1, y2, v0, v1, v2):
    # differential of the closest-point map at y (symmetric matrix) applied to v
    if kind == 0:
        f = a / t
        h0, h1, h2 = y0 / t, y1 / t, y2 / t
        d = h0 * v0 + h1 * v1 + h2 * v2
        return f * (v0 - h0 * d), f * (v1 - h1 * d), f * (v2 - h2 * d)
    a2 = a * a
    b2 = b * b
    c2 = c * c
    d0 = a2 / (a2 + t)
    d1 = b2 / (b2 + t)
    d2 = c2 / (c2 + t)
    m0, m1, m2 = x0 / a2, x1 / b2, x2 / c2
    q0, q1, q2 = d0 * m0, d1 * m1, d2 * m2
    den = m0 * q0 + m1 * q1 + m2 * q2
    dot = (q0 * v0 + q1 * v1 + q2 * v2) / den
    return d0 * v0 - q0 * dot, d1 * v1 - q1 * dot, d2 * v2 - q2 * dot


@njit(cache=True)
def project_points(Y, kind, a, b, c, tube):
    n = Y.shape[0]
    X = np.empty((n, 3))
    T = np.empty(n)
    worst = 0
    for i in range(n):
        x0, x1, x2, t, st = _proj1(Y[i, 0], Y[i, 1], Y[i, 2], kind, a, b, c, tube)
        X[i, 0] = x0
        X[i, 1] = x1
        X[i, 2] = x2
        T[i] = t
        if st > worst:
            worst = st
    return X, T, worst


@njit(cache=True)
def perturbed_length(u, eps):
    M = u.shape[0]
    h = 2.0 * math.pi / M
    base = eps ** (1.0 + eps)
    expo = 0.5 * (1.0 + eps)
    total = 0.0
    for j in range(M):
        jn = (j + 1) % M
        e2 = 0.0
        for k in range(3):
            d = (u[jn, k] - u[j, k]) / h
            e2 += d * d
        total += base * math.expm1(expo * math.log1p(e2 / (eps * eps)))
    return h * total


@njit(cache=True)
def edge_flux(u, eps):
    M = u.shape[0]
    h = 2.0 * math.pi / M
    W = np.empty((M, 3))
    for j in range(M):
        jn = (j + 1) % M
        e0 = (u[jn, 0] - u[j, 0]) / h
        e1 = (u[jn, 1] - u[j, 1]) / h
        e2 = (u[jn, 2] - u[j, 2]) / h
        q = eps * eps + e0 * e0 + e1 * e1 + e2 * e2
        fac = (1.0 + eps) * q ** (0.5 * (eps - 1.0))
        W[j, 0] = fac * e0
        W[j, 1] = fac * e1
        W[j, 2] = fac * e2
    return W


@njit(cache=True)
def area_coefficients(u, kind, a, b, c, tube, sx, sw):
    """Per-edge weights (cm, cp) with d(area)[psi] = sum cm_j.psi_j + cp_j.psi_{j+1}."""
    M = u.shape[0]
    cm = np.zeros((M, 3))
    cp = np.zeros((M, 3))
    worst = 0
    for j in range(M):
        jn = (j + 1) % M
        e0 = u[jn, 0] - u[j, 0]
        e1 = u[jn, 1] - u[j, 1]
        e2 = u[jn, 2] - u[j, 2]
        for m in range(sx.shape[0]):
            s = sx[m]
            y0 = (1.0 - s) * u[j, 0] + s * u[jn, 0]
            y1 = (1.0 - s) * u[j, 1] + s * u[jn, 1]
            y2 = (1.0 - s) * u[j, 2] + s * u[jn, 2]
            x0, x1, x2, t, st = _proj1(y0, y1, y2, kind, a, b, c, tube)
            if st > worst:
                worst = st
            if st == 2:
                continue
            n0, n1, n2 = _normal1(x0, x1, x2, kind, a, b, c)
            g0, g1, g2 = _dproj1(kind, a, b, c, x0, x1, x2, t, y0, y1, y2, e0, e1, e2)
            w0 = n1 * g2 - n2 * g1
            w1 = n2 * g0 - n0 * g2
            w2 = n0 * g1 - n1 * g0
            z0, z1, z2 = _dproj1(kind, a, b, c, x0, x1, x2, t, y0, y1, y2, w0, w1, w2)
            wt = sw[m]
            cm[j, 0] += wt * (1.0 - s) * z0
            cm[j, 1] += wt * (1.0 - s) * z1
            cm[j, 2] += wt * (1.0 - s) * z2
            cp[j, 0] += wt * s * z0
            cp[j, 1] += wt * s * z1
            cp[j, 2] += wt * s * z2
    return cm, cp, worst


@njit(cache=True)
def gradient(u, eps, kappa, kind, a, b, c, tube, sx, sw):
    M = u.shape[0]
    h = 2.0 * math.pi / M
    W = edge_flux(u, eps)
    raw = np.empty((M, 3))
    for k in range(M):
        km = (k - 1) % M
        for i in range(3):
            raw[k, i] = (W[km, i] - W[k, i]) / h
    worst = 0
    if kappa != 0.0:
        cm, cp, worst = area_coefficients(u, kind, a, b, c, tube, sx, sw)
        for k in range(M):
            km = (k - 1) % M
            for i in range(3):
                raw[k, i] += kappa * (cm[k, i] + cp[km, i]) / h
    g = np.empty((M, 3))
    for k in range(M):
        n0, n1, n2 = _normal1(u[k, 0], u[k, 1], u[k, 2], kind, a, b, c)
        d = n0 * raw[k, 0] + n1 * raw[k, 1] + n2 * raw[k, 2]
        g[k, 0] = raw[k, 0] - d * n0
        g[k, 1] = raw[k, 1] - d * n1
        g[k, 2] = raw[k, 2] - d * n2
    return g, worst


@njit(cache=True)
def area_increment(u, v, K, tx, tw, sx, sw, kind, a, b, c, tube):
    M = u.shape[0]
    total = 0.0
    worst = 0
    for k in range(K):
        for g in range(tx.shape[0]):
            s = (k + tx[g]) / K
            wt = tw[g] / K
            acc = 0.0
            for j in range(M):
                jn = (j + 1) % M
                A0 = (1.0 - s) * u[j, 0] + s * v[j, 0]
                A1 = (1.0 - s) * u[j, 1] + s * v[j, 1]
                A2 = (1.0 - s) * u[j, 2] + s * v[j, 2]
                B0 = (1.0 - s) * u[jn, 0] + s * v[jn, 0]
                B1 = (1.0 - s) * u[jn, 1] + s * v[jn, 1]
                B2 = (1.0 - s) * u[jn, 2] + s * v[jn, 2]
                V0 = v[j, 0] - u[j, 0]
                V1 = v[j, 1] - u[j, 1]
                V2 = v[j, 2] - u[j, 2]
                U0 = v[jn, 0] - u[jn, 0]
                U1 = v[jn, 1] - u[jn, 1]
                U2 = v[jn, 2] - u[jn, 2]
                for m in range(sx.shape[0]):
                    r = sx[m]
                    y0 = (1.0 - r) * A0 + r * B0
                    y1 = (1.0 - r) * A1 + r * B1
                    y2 = (1.0 - r) * A2 + r * B2
                    x0, x1, x2, t, st = _proj1(y0, y1, y2, kind, a, b, c, tube)
                    if st > worst:
                        worst = st
                    if st == 2:
                        continue
                    n0, n1, n2 = _normal1(x0, x1, x2, kind, a, b, c)
                    p0, p1, p2 = _dproj1(kind, a, b, c, x0, x1, x2, t, y0, y1, y2,
                                         B0 - A0, B1 - A1, B2 - A2)
                    q0, q1, q2 = _dproj1(kind, a, b, c, x0, x1, x2, t, y0, y1, y2,
                                         (1.0 - r) * V0 + r * U0,
                                         (1.0 - r) * V1 + r * U1,
                                         (1.0 - r) * V2 + r * U2)
                    acc += sw[m] * (n0 * (p1 * q2 - p2 * q1)
                                    + n1 * (p2 * q0 - p0 * q2)
                                    + n2 * (p0 * q1 - p1 * q0))
            total += wt * acc
    return total, worst
