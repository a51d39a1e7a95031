"""Dispatch layer over the numba and numpy kernel implementations.

Both backends share one calling convention; the surface is passed as the
flat tuple ``(kind, a, b, c, tube)`` returned by ``SurfaceModel.params``.
"""
import numpy as np

from ._accel import USE_NUMBA, backend_name

from . import _kernels_numpy as _np_impl

if USE_NUMBA:
    from . import _kernels_numba as _impl
else:
    from . import _kernels_numpy as _impl

STATUS_OK = 0
STATUS_OUTSIDE = 1
STATUS_DEGENERATE = 2


def gauss_legendre01(n):
    """Gauss-Legendre nodes and weights mapped to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


# three-point rules are exact for the quintic polynomials that the bilinear
# homotopy cells produce on flat pieces, which is plenty for smooth surfaces
EDGE_NODES, EDGE_WEIGHTS = gauss_legendre01(3)
TIME_NODES, TIME_WEIGHTS = gauss_legendre01(3)


def dproj(surface_params, X, T, Y, V):
    """Differential of the closest-point map at Y (footpoint X, multiplier T) applied to V."""
    kind, a, b, c, _ = surface_params
    return _np_impl._dproj(kind, a, b, c, X, T, Y, V)


def max_chord(u):
    return float(np.sqrt(np.max(np.sum((np.roll(u, -1, axis=0) - u) ** 2, axis=1))))


def edge_rule(chord, tube):
    """Composite Gauss-Legendre rule along an edge, one cell per tube/4 of chord."""
    n = max(1, int(np.ceil(chord / (0.25 * tube))))
    if n == 1:
        return EDGE_NODES, EDGE_WEIGHTS
    k = np.arange(n)[:, None]
    return ((k + EDGE_NODES[None, :]) / n).ravel(), np.tile(EDGE_WEIGHTS / n, n)


def _arr(u):
    return np.ascontiguousarray(u, dtype=np.float64)


def project_points(Y, sp):
    Y = _arr(Y).reshape(-1, 3)
    return _impl.project_points(Y, *sp)


def perturbed_length(u, eps):
    return float(_impl.perturbed_length(_arr(u), float(eps)))


def edge_flux(u, eps):
    return _impl.edge_flux(_arr(u), float(eps))


def area_coefficients(u, sp):
    return _impl.area_coefficients(_arr(u), *sp, EDGE_NODES, EDGE_WEIGHTS)


def gradient(u, eps, kappa, sp):
    return _impl.gradient(_arr(u), float(eps), float(kappa), *sp, EDGE_NODES, EDGE_WEIGHTS)


def area_increment(u, v, K, sp):
    """Signed area swept from ``u`` to ``v``; exactly antisymmetric in (u, v)."""
    u = _arr(u)
    v = _arr(v)
    flip = u.tobytes() > v.tobytes()
    if flip:
        u, v = v, u
    sx, sw = edge_rule(max(max_chord(u), max_chord(v)), sp[4])
    total, worst = _impl.area_increment(u, v, int(K), TIME_NODES, TIME_WEIGHTS, sx, sw, *sp)
    return (-total if flip else total), worst


__all__ = ["backend_name", "gauss_legendre01", "project_points", "perturbed_length",
           "edge_flux", "dproj", "area_coefficients", "gradient", "area_increment"]
