"""Vectorized numpy twins of the numba kernels (same signatures, same status codes)."""
import numpy as np


def _proj(Y, kind, a, b, c, tube):
    Y = np.asarray(Y, dtype=float)
    shape = Y.shape
    Y = Y.reshape(-1, 3)
    ny = np.sqrt(np.einsum("ij,ij->i", Y, Y))
    status = np.zeros(len(Y), dtype=np.int64)
    if kind == 0:
        bad = ny < 1e-12 * a
        safe = np.where(bad, 1.0, ny)
        X = Y * (a / safe)[:, None]
        X[bad] = 0.0
        status[np.abs(ny - a) > tube] = 1
        status[bad] = 2
        return X.reshape(shape), ny.reshape(shape[:-1]), status.reshape(shape[:-1])

    ax2 = np.array([a * a, b * b, c * c])
    axes = np.sqrt(ax2)
    amin2 = ax2.min()
    bad = ny < 1e-12 * np.sqrt(amin2)
    lo = np.full(len(Y), -amin2)
    hi = ny * np.sqrt(ax2.max())
    t = np.zeros(len(Y))
    out = (t <= lo) | (t >= hi)
    t[out] = 0.5 * (lo[out] + hi[out])
    active = ~bad
    for _ in range(200):
        if not active.any():
            break
        den = ax2[None, :] + t[:, None]
        p = axes[None, :] * Y / den
        f = np.einsum("ij,ij->i", p, p) - 1.0
        df = -2.0 * np.einsum("ij,ij->i", p * p, 1.0 / den)
        pos = active & (f > 0.0)
        neg = active & ~(f > 0.0)
        lo[pos] = t[pos]
        hi[neg] = t[neg]
        with np.errstate(divide="ignore", invalid="ignore"):
            tn = t - f / df
        fix = ~((lo < tn) & (tn < hi))
        tn[fix] = 0.5 * (lo[fix] + hi[fix])
        done = np.abs(tn - t) <= 1e-15 * (1.0 + np.abs(t))
        t = np.where(active, tn, t)
        active = active & ~done
    X = ax2[None, :] * Y / (ax2[None, :] + t[:, None])
    deg = bad | (t + amin2 < 1e-12 * amin2)
    d = np.linalg.norm(X - Y, axis=1)
    status[d > tube] = 1
    status[deg] = 2
    X[deg] = 0.0
    return X.reshape(shape), t.reshape(shape[:-1]), status.reshape(shape[:-1])


def project_points(Y, kind, a, b, c, tube):
    X, T, st = _proj(Y, kind, a, b, c, tube)
    return X, T, int(st.max()) if st.size else 0


def _normal(X, kind, a, b, c):
    if kind == 0:
        m = X
    else:
        m = X / np.array([a * a, b * b, c * c])
    nm = np.linalg.norm(m, axis=-1, keepdims=True)
    return m / np.where(nm == 0.0, 1.0, nm)


def _dproj(kind, a, b, c, X, T, Y, V):
    if kind == 0:
        tt = np.where(T == 0.0, 1.0, T)[..., None]
        H = Y / tt
        d = np.sum(H * V, axis=-1, keepdims=True)
        return (a / tt) * (V - H * d)
    ax2 = np.array([a * a, b * b, c * c])
    D = ax2 / (ax2 + T[..., None])
    m = X / ax2
    q = D * m
    den = np.sum(m * q, axis=-1, keepdims=True)
    den = np.where(den == 0.0, 1.0, den)
    dot = np.sum(q * V, axis=-1, keepdims=True) / den
    return D * V - q * dot


def perturbed_length(u, eps):
    M = len(u)
    h = 2.0 * np.pi / M
    e = (np.roll(u, -1, axis=0) - u) / h
    e2 = np.einsum("ij,ij->i", e, e)
    base = eps ** (1.0 + eps)
    return h * np.sum(base * np.expm1(0.5 * (1.0 + eps) * np.log1p(e2 / (eps * eps))))


def edge_flux(u, eps):
    M = len(u)
    h = 2.0 * np.pi / M
    e = (np.roll(u, -1, axis=0) - u) / h
    q = eps * eps + np.einsum("ij,ij->i", e, e)
    return ((1.0 + eps) * q ** (0.5 * (eps - 1.0)))[:, None] * e


def area_coefficients(u, kind, a, b, c, tube, sx, sw):
    un = np.roll(u, -1, axis=0)
    E = un - u
    S = np.asarray(sx)[None, :, None]
    Y = (1.0 - S) * u[:, None, :] + S * un[:, None, :]
    X, T, st = _proj(Y, kind, a, b, c, tube)
    N = _normal(X, kind, a, b, c)
    Eb = np.broadcast_to(E[:, None, :], Y.shape)
    G = _dproj(kind, a, b, c, X, T, Y, Eb)
    Wv = np.cross(N, G)
    Z = _dproj(kind, a, b, c, X, T, Y, Wv)
    Z[st == 2] = 0.0
    wt = np.asarray(sw)[None, :, None]
    cm = np.sum(wt * (1.0 - S) * Z, axis=1)
    cp = np.sum(wt * S * Z, axis=1)
    return cm, cp, int(st.max())


def gradient(u, eps, kappa, kind, a, b, c, tube, sx, sw):
    M = len(u)
    h = 2.0 * np.pi / M
    W = edge_flux(u, eps)
    raw = (np.roll(W, 1, axis=0) - W) / h
    worst = 0
    if kappa != 0.0:
        cm, cp, worst = area_coefficients(u, kind, a, b, c, tube, sx, sw)
        raw = raw + kappa * (cm + np.roll(cp, 1, axis=0)) / h
    N = _normal(u, kind, a, b, c)
    g = raw - N * np.einsum("ij,ij->i", N, raw)[:, None]
    return g, worst


def area_increment(u, v, K, tx, tw, sx, sw, kind, a, b, c, tube):
    un = np.roll(u, -1, axis=0)
    vn = np.roll(v, -1, axis=0)
    s = ((np.arange(K)[:, None] + np.asarray(tx)[None, :]) / K).ravel()
    ws = (np.broadcast_to(np.asarray(tw)[None, :], (K, len(tx))) / K).ravel()
    r = np.asarray(sx)
    Sg = s[:, None, None, None]
    R = r[None, None, :, None]
    A = (1.0 - Sg) * u[None, :, None, :] + Sg * v[None, :, None, :]
    B = (1.0 - Sg) * un[None, :, None, :] + Sg * vn[None, :, None, :]
    Y = (1.0 - R) * A + R * B
    Vd = (1.0 - R) * (v - u)[None, :, None, :] + R * (vn - un)[None, :, None, :]
    X, T, st = _proj(Y, kind, a, b, c, tube)
    N = _normal(X, kind, a, b, c)
    P = _dproj(kind, a, b, c, X, T, Y, np.broadcast_to(B - A, Y.shape))
    Q = _dproj(kind, a, b, c, X, T, Y, np.broadcast_to(Vd, Y.shape))
    trip = np.einsum("...i,...i->...", N, np.cross(P, Q))
    trip[st == 2] = 0.0
    total = np.einsum("g,gjm,m->", ws, trip, np.asarray(sw))
    return float(total), int(st.max())
