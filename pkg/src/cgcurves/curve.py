"""Closed curves sampled on the uniform grid theta_j = 2*pi*j/M.

Lengths and the regularized length use edge (chord) differences
``e_j = (u_{j+1} - u_j) / h``; ``derivative`` returns the second-order
central difference for pointwise work.
"""
import csv
import math

import numpy as np
from scipy.interpolate import CubicSpline

from . import kernels
from .errors import DegenerateCurve, EpsilonOutOfRange

SURFACE_TOL = 1e-10


def nodes_of(u):
    """Return the (M, 3) node array of a DiscreteCurve or array-like."""
    if isinstance(u, DiscreteCurve):
        return u.nodes
    return np.asarray(u, dtype=float)


class DiscreteCurve:
    """Closed curve on a surface given by M nodes (M even, M >= 8).

    Parameters
    ----------
    nodes : array_like, shape (M, 3)
    surface : SurfaceModel, optional
        When given, nodes are checked to lie on the surface.
    project : bool
        Project the nodes onto ``surface`` first.
    """

    __slots__ = ("nodes",)

    def __init__(self, nodes, surface=None, project=False):
        X = np.array(nodes, dtype=float)
        if X.ndim != 2 or X.shape[1] != 3:
            raise ValueError("nodes must have shape (M, 3)")
        M = X.shape[0]
        if M < 8 or M % 2:
            raise ValueError(f"node count must be even and >= 8, got {M}")
        if surface is not None:
            if project:
                X = surface.project(X)
            drift = np.max(np.abs(surface.implicit(X)))
            if drift > SURFACE_TOL:
                raise ValueError(f"nodes are {drift:.2e} off the surface")
        X.setflags(write=False)
        self.nodes = X

    @property
    def M(self):
        return self.nodes.shape[0]

    @property
    def theta(self):
        return 2.0 * np.pi * np.arange(self.M) / self.M

    def __len__(self):
        return self.M

    def __array__(self, dtype=None, copy=None):
        return self.nodes if dtype is None else self.nodes.astype(dtype)

    def __repr__(self):
        return f"DiscreteCurve(M={self.M})"


def _check_eps(eps):
    if not (0.0 < eps < 1.0):
        raise EpsilonOutOfRange(f"eps must lie in (0, 1), got {eps}")


def grid_step(u):
    return 2.0 * math.pi / len(nodes_of(u))


def edge_derivative(u):
    X = nodes_of(u)
    return (np.roll(X, -1, axis=0) - X) / grid_step(X)


def derivative(u):
    """Central periodic difference (u_{j+1} - u_{j-1}) M / (4 pi)."""
    X = nodes_of(u)
    return (np.roll(X, -1, axis=0) - np.roll(X, 1, axis=0)) / (2.0 * grid_step(X))


def second_derivative(u):
    X = nodes_of(u)
    h = grid_step(X)
    return (np.roll(X, -1, axis=0) - 2.0 * X + np.roll(X, 1, axis=0)) / (h * h)


def length(u):
    """Polygon length, i.e. the periodic trapezoid rule applied to |e_j|."""
    X = nodes_of(u)
    return float(np.sum(np.linalg.norm(np.roll(X, -1, axis=0) - X, axis=1)))


def perturbed_length(u, eps):
    """L_eps(u) = int (eps^2 + |u'|^2)^((1+eps)/2) - eps^(1+eps) dtheta."""
    _check_eps(eps)
    return kernels.perturbed_length(nodes_of(u), eps)


def sobolev_norm(u, eps):
    """Discrete W^{1,1+eps} norm (int |u|^p + |u'|^p)^(1/p), p = 1 + eps."""
    _check_eps(eps)
    X = nodes_of(u)
    p = 1.0 + eps
    h = grid_step(X)
    total = h * (np.sum(np.linalg.norm(X, axis=1) ** p)
                 + np.sum(np.linalg.norm(edge_derivative(X), axis=1) ** p))
    return float(total ** (1.0 / p))


def speeds(u):
    """Edge speeds |e_j| of the curve."""
    return np.linalg.norm(edge_derivative(u), axis=1)


def speed_stats(u):
    """Mean edge speed and its relative standard deviation."""
    s = speeds(u)
    mean = float(np.mean(s))
    if mean == 0.0:
        return 0.0, math.inf
    return mean, float(np.std(s) / mean)


def resample_arclength(u, M_out, surface, tol=1e-12, max_iter=30):
    """Resample to M_out nodes equispaced in arclength.

    A periodic cubic spline through the nodes, parametrized by cumulative
    chord length, is evaluated at equispaced targets and projected back to
    the surface.  The targets are then corrected until the output chords are
    equal.  Node 0 is kept fixed.
    """
    X = nodes_of(u)
    chords = np.linalg.norm(np.roll(X, -1, axis=0) - X, axis=1)
    total = chords.sum()
    if total < 1e-12 * max(surface.axes):
        raise DegenerateCurve("curve has (numerically) zero length")
    if np.any(chords == 0.0):
        keep = chords > 0.0
        X = X[keep]
        chords = chords[keep]
        if len(X) < 4:
            raise DegenerateCurve("too few distinct nodes to resample")
    s = np.concatenate([[0.0], np.cumsum(chords)])
    spline = CubicSpline(s, np.vstack([X, X[:1]]), bc_type="periodic")
    target = np.arange(M_out) / M_out
    params = target * total
    Y = X[:1]
    for _ in range(max_iter):
        Y = surface.project(spline(params))
        Y[0] = X[0]
        ch = np.linalg.norm(np.roll(Y, -1, axis=0) - Y, axis=1)
        achieved = np.concatenate([[0.0], np.cumsum(ch)[:-1]]) / ch.sum()
        err = target - achieved
        if np.max(np.abs(err)) < tol:
            break
        params = params + err * total
    return DiscreteCurve(Y, surface)


def write_csv(u, path):
    """Write ``theta,x,y,z`` rows with 17 significant digits."""
    X = nodes_of(u)
    M = len(X)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["theta", "x", "y", "z"])
        for j in range(M):
            th = 2.0 * math.pi * j / M
            w.writerow([f"{th:.17g}"] + [f"{v:.17g}" for v in X[j]])


def read_csv(path, surface=None):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    X = np.array([[float(r["x"]), float(r["y"]), float(r["z"])] for r in rows])
    return DiscreteCurve(X, surface)


def latitude(surface, phi, M, phase=0.0, param=None):
    """Latitude circle at colatitude ``phi`` (scaled latitude on an ellipsoid).

    Runs counterclockwise seen from +z.  ``param`` optionally maps the uniform
    grid to the angle actually used (for non-uniform test parametrizations).
    """
    th = 2.0 * np.pi * np.arange(M) / M
    if param is not None:
        th = param(th)
    th = th + phase
    a, b, c = surface.axes
    X = np.stack([a * np.sin(phi) * np.cos(th), b * np.sin(phi) * np.sin(th),
                  c * np.cos(phi) * np.ones_like(th)], axis=1)
    return DiscreteCurve(X, surface)


def point_curve(point, M):
    return DiscreteCurve(np.repeat(np.asarray(point, dtype=float)[None, :], M, axis=0))
