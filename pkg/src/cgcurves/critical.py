"""Newton refinement of a curve to a critical point of the weighted action.

The curve is moved in the chart x -> Pi(u0 + B x), with B an orthonormal
tangent frame at every node, so the unknowns are 2M tangent coordinates.
The chart Hessian is assembled from central differences of the chart
gradient; because the gradient at node k only involves nodes k-1..k+1,
nodes spaced three or more apart are perturbed together (graph colouring).
Rotations that are symmetries of the surface are projected out exactly,
and the remaining near-null directions are dropped by a relative
eigenvalue cut.  Saddles of any index are handled the same way.
"""
from dataclasses import dataclass, field
import logging
import math

import numpy as np

from . import kernels
from .action import area_increment, gradient
from .curve import nodes_of, perturbed_length, speed_stats
from .errors import PointOutsideTube

log = logging.getLogger(__name__)


@dataclass
class RefineResult:
    curve: np.ndarray
    area: float
    action: float
    grad_sup: float
    iterations: int
    converged: bool
    morse_index: int = -1
    nullity: int = 0
    history: list = field(default_factory=list)

    @property
    def speed_mean(self):
        return speed_stats(self.curve)[0]

    @property
    def speed_rel_std(self):
        return speed_stats(self.curve)[1]


def tangent_frame(surface, X):
    """Orthonormal tangent vectors (b1, b2) at every node, each (M, 3)."""
    n = surface.normal(X)
    idx = np.argmin(np.abs(n), axis=1)
    e = np.zeros_like(X)
    e[np.arange(len(X)), idx] = 1.0
    b1 = e - n * np.sum(n * e, axis=1, keepdims=True)
    b1 /= np.linalg.norm(b1, axis=1, keepdims=True)
    b2 = np.cross(n, b1)
    return b1, b2


def symmetry_axes(surface):
    """Coordinate axes about which the surface is rotationally symmetric."""
    a = surface.axes
    out = []
    for i in range(3):
        j, k = [m for m in range(3) if m != i]
        if a[j] == a[k]:
            out.append(i)
    return out


class _Chart:
    def __init__(self, surface, params, X0):
        self.surface = surface
        self.sp = surface.params
        self.params = params
        self.X0 = np.array(X0, dtype=float)
        self.b1, self.b2 = tangent_frame(surface, self.X0)
        self.M = len(self.X0)
        self.h = 2.0 * math.pi / self.M

    def point(self, x):
        x = x.reshape(self.M, 2)
        Y = self.X0 + self.b1 * x[:, :1] + self.b2 * x[:, 1:]
        X, T, status = kernels.project_points(Y, self.sp)
        if status != kernels.STATUS_OK:
            raise PointOutsideTube("Newton iterate left the projection tube")
        return X, T, Y

    def grad(self, x):
        X, T, Y = self.point(x)
        g = gradient(X, self.params, self.surface)
        dg = kernels.dproj(self.sp, X, T, Y, g)
        out = np.stack([np.sum(dg * self.b1, axis=1), np.sum(dg * self.b2, axis=1)], axis=1)
        return self.h * out.ravel(), g, X

    def hessian(self, delta):
        M = self.M
        n = 2 * M
        colours = next((c for c in range(3, 9) if M % c == 0), None)
        H = np.zeros((n, n))
        if colours is None:
            for col in range(n):
                x = np.zeros(n)
                x[col] = delta
                H[:, col] = (self.grad(x)[0] - self.grad(-x)[0]) / (2.0 * delta)
        else:
            for c in range(colours):
                nodes = np.arange(c, M, colours)
                for a in range(2):
                    x = np.zeros((M, 2))
                    x[nodes, a] = delta
                    d = ((self.grad(x.ravel())[0] - self.grad(-x.ravel())[0])
                         / (2.0 * delta)).reshape(M, 2)
                    for off in (-1, 0, 1):
                        rows = (nodes + off) % M
                        H[2 * rows, 2 * nodes + a] = d[rows, 0]
                        H[2 * rows + 1, 2 * nodes + a] = d[rows, 1]
        return 0.5 * (H + H.T)

    def symmetry_modes(self):
        cols = []
        for i in symmetry_axes(self.surface):
            w = np.zeros(3)
            w[i] = 1.0
            v = np.cross(w, self.X0)
            cols.append(np.stack([np.sum(v * self.b1, axis=1),
                                  np.sum(v * self.b2, axis=1)], axis=1).ravel())
        if not cols:
            return np.zeros((2 * self.M, 0))
        Q, R = np.linalg.qr(np.array(cols).T)
        keep = np.abs(np.diag(R)) > 1e-10 * max(1.0, np.abs(R).max())
        return Q[:, keep]


def newton_step(chart, rel_cut=1e-9):
    """Pseudo-inverse Newton step in chart coordinates at x = 0."""
    g0, graw, _ = chart.grad(np.zeros(2 * chart.M))
    chord = np.mean(np.linalg.norm(np.roll(chart.X0, -1, axis=0) - chart.X0, axis=1))
    delta = 1e-4 * max(chord, 1e-6)
    H = chart.hessian(delta)
    S = chart.symmetry_modes()
    if S.shape[1]:
        P = np.eye(len(g0)) - S @ S.T
        H = P @ H @ P
        g0p = P @ g0
    else:
        g0p = g0
    lam, V = np.linalg.eigh(H)
    cut = rel_cut * np.abs(lam).max()
    keep = np.abs(lam) > cut
    coeff = (V[:, keep].T @ g0p) / lam[keep]
    dx = -(V[:, keep] @ coeff)
    morse = int(np.sum(lam[keep] < 0.0))
    nullity = int(np.sum(~keep))
    return dx, g0, graw, morse, nullity


def refine(u, surface, params, area=0.0, tol_grad=1e-8, max_iter=40, step_cap=None):
    """Newton iteration to a critical curve.

    Parameters
    ----------
    u : curve or (M, 3) array on the surface
    area : float
        Ledger value of ``u``; updated through the accepted steps.
    tol_grad : float
        Stopping threshold on the sup norm of the projected gradient.

    Returns
    -------
    RefineResult
    """
    X = np.array(nodes_of(u), dtype=float)
    if step_cap is None:
        step_cap = surface.tube_radius / 8.0
    hist = []
    morse, nullity = -1, 0
    g = gradient(X, params, surface)
    gsup = float(np.max(np.linalg.norm(g, axis=1)))
    it = 0
    for it in range(1, max_iter + 1):
        if gsup < tol_grad:
            it -= 1
            break
        chart = _Chart(surface, params, X)
        dx, g0, _, morse, nullity = newton_step(chart)
        nodal = np.linalg.norm(dx.reshape(-1, 2), axis=1).max()
        if nodal > step_cap:
            dx *= step_cap / nodal
        merit0 = float(np.linalg.norm(g0))
        alpha = 1.0
        accepted = False
        for _ in range(12):
            try:
                gt, graw, Xt = chart.grad(alpha * dx)
            except PointOutsideTube:
                alpha *= 0.5
                continue
            if np.linalg.norm(gt) < merit0 or alpha < 1e-3:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            log.debug("newton line search failed at iteration %d", it)
            break
        area += area_increment(X, Xt, surface)
        X = Xt
        g = graw
        gsup = float(np.max(np.linalg.norm(g, axis=1)))
        hist.append((it, gsup, alpha))
        log.debug("newton it=%d |g|=%.3e alpha=%.3g morse=%d", it, gsup, alpha, morse)
    if gsup < tol_grad and morse < 0:
        chart = _Chart(surface, params, X)
        _, _, _, morse, nullity = newton_step(chart)
    action = perturbed_length(X, params.eps) + params.kappa * area
    return RefineResult(X, area, action, gsup, it, gsup < tol_grad, morse, nullity, hist)
