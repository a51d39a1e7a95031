"""Weighted action L_eps + kappa * A, the area ledger, gradients and degree.

The enclosed area is never evaluated as a multi-valued functional.  It is
accumulated along homotopies: for two nearby curves u, v the swept area of
q(s, theta) = Pi((1 - s) u + s v) is integrated with Gauss-Legendre rules
over projected chords, so the discrete area form is exact on closed loops
up to quadrature error.
"""
from dataclasses import dataclass
import math

import numpy as np

from . import kernels
from .curve import nodes_of, grid_step, perturbed_length
from .errors import (AmbiguousDegree, CurvesTooFar, EmptySampleSet, EpsilonOutOfRange,
                     LedgerMismatch, NonTangentField, PointOutsideTube)

TANGENT_TOL = 1e-8


@dataclass(frozen=True)
class ActionParams:
    kappa: float
    eps: float

    def __post_init__(self):
        if not self.kappa >= 0.0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if not (0.0 < self.eps < 1.0):
            raise EpsilonOutOfRange(f"eps must lie in (0, 1), got {self.eps}")


def sup_distance(u, v):
    return float(np.max(np.linalg.norm(nodes_of(u) - nodes_of(v), axis=1)))


def substep_count(u, v, surface):
    """Homotopy substeps so each moves less than min(tube/4, 2*pi/M)."""
    d = sup_distance(u, v)
    cap = min(surface.tube_radius / 4.0, grid_step(u))
    return max(1, int(math.ceil(d / cap)))


def area_increment(u, v, surface, check=True):
    """Signed area swept by the projected straight homotopy from ``u`` to ``v``.

    Exactly antisymmetric in its arguments.  Raises CurvesTooFar when the
    curves are farther apart than tube_radius/2 in the sup norm.
    """
    U = nodes_of(u)
    V = nodes_of(v)
    if U.shape != V.shape:
        raise ValueError("curves must have the same node count")
    d = sup_distance(U, V)
    if d == 0.0:
        return 0.0
    if check and d >= 0.5 * surface.tube_radius:
        raise CurvesTooFar(f"curves {d:.3g} apart; subdivide the homotopy")
    total, status = kernels.area_increment(U, V, substep_count(U, V, surface), surface.params)
    if status != kernels.STATUS_OK:
        raise PointOutsideTube("homotopy leaves the projection tube")
    return total


def homotopy_area(curves, surface):
    """Total area swept along a discrete path of curves."""
    total = 0.0
    for a, b in zip(curves[:-1], curves[1:]):
        total += area_increment(a, b, surface)
    return total


def cumulative_areas(curves, surface):
    """Ledger values A(f_i) from the first curve, one per curve."""
    out = np.zeros(len(curves))
    for i in range(1, len(curves)):
        out[i] = out[i - 1] + area_increment(curves[i - 1], curves[i], surface)
    return out


def reduce_area(area, total_area):
    """Reduce to the interval (-total/2, total/2]."""
    r = area - total_area * math.floor(area / total_area + 0.5)
    if r <= -0.5 * total_area:
        r += total_area
    return r


class AreaLedger:
    """Running (unwrapped) enclosed area of ``base_curve``.

    A fresh ledger starts at a point curve with zero area; ``advance`` moves
    the base curve and adds the swept area.
    """

    def __init__(self, base_curve, accumulated=0.0):
        self.base_curve = np.array(nodes_of(base_curve), dtype=float)
        self.accumulated = float(accumulated)

    def advance(self, v, surface):
        V = np.array(nodes_of(v), dtype=float)
        self.accumulated += area_increment(self.base_curve, V, surface)
        self.base_curve = V
        return self.accumulated

    def advance_path(self, curves, surface):
        for v in curves:
            self.advance(v, surface)
        return self.accumulated

    def matches(self, u):
        return np.array_equal(self.base_curve, nodes_of(u))

    def copy(self):
        return AreaLedger(self.base_curve, self.accumulated)

    def __repr__(self):
        return f"AreaLedger(accumulated={self.accumulated!r}, M={len(self.base_curve)})"


def weighted_action(u, ledger, params):
    """L_eps(u) + kappa * ledger.accumulated."""
    if not ledger.matches(u):
        raise LedgerMismatch("ledger base curve differs from the evaluated curve")
    return perturbed_length(u, params.eps) + params.kappa * ledger.accumulated


def _raise_status(status):
    if status != kernels.STATUS_OK:
        raise PointOutsideTube("curve leaves the projection tube")


def gradient(u, params, surface):
    """Riesz representative g of the projected first variation (weight 2*pi/M).

    For every tangent field psi, ``h * sum_j g_j . psi_j`` is the exact
    derivative of the discrete action along psi.
    """
    g, status = kernels.gradient(nodes_of(u), params.eps, params.kappa, surface.params)
    _raise_status(status)
    return g


def _check_tangent(u, psi, surface):
    n = surface.normal(nodes_of(u))
    off = np.abs(np.sum(n * psi, axis=1))
    if np.any(off > TANGENT_TOL * np.maximum(1.0, np.linalg.norm(psi, axis=1))):
        raise NonTangentField("field is not tangent along the curve")


def first_variation(u, psi, params, surface, check=True):
    """delta L(u)(psi) for a tangent field psi, by the same discrete stencils."""
    X = nodes_of(u)
    psi = np.asarray(psi, dtype=float)
    if check:
        _check_tangent(X, psi, surface)
    W = kernels.edge_flux(X, params.eps)
    dpsi = np.roll(psi, -1, axis=0) - psi
    val = float(np.sum(W * dpsi))
    if params.kappa != 0.0:
        cm, cp, status = kernels.area_coefficients(X, surface.params)
        _raise_status(status)
        val += params.kappa * float(np.sum(cm * psi) + np.sum(cp * np.roll(psi, -1, axis=0)))
    return val


def pairing(u, g, psi):
    """Discrete L^2 pairing h * sum g_j . psi_j."""
    return grid_step(u) * float(np.sum(np.asarray(g) * np.asarray(psi)))


def dual_norms(u, params, surface, sample_fields):
    """Sampled lower bounds (delta_estimate, G_estimate) of the dual norms.

    ``G_estimate`` pairs the gradient with the raw samples; ``delta_estimate``
    evaluates the first variation on the tangent-projected samples, scaled by
    1/max(1, |P psi|) so they stay in the unit ball.
    """
    samples = list(sample_fields)
    if not samples:
        raise EmptySampleSet("need at least one sample field")
    from .curve import sobolev_norm  # local: only needed here
    X = nodes_of(u)
    g = gradient(X, params, surface)
    delta = 0.0
    G = 0.0
    for psi in samples:
        psi = np.asarray(psi, dtype=float)
        G = max(G, abs(pairing(X, g, psi)))
        tp = surface.tangent_projector(X, psi)
        scale = max(1.0, sobolev_norm(tp, params.eps))
        delta = max(delta, abs(first_variation(X, tp / scale, params, surface, check=False)))
    return delta, G


def degree_with_residual(slices, surface):
    """Degree of a sweepout and its rounding residual.

    With the outward orientation a north-to-south sweep covers area
    ``-Area(S^2)``; that sweep is counted as degree +1.
    """
    curves = getattr(slices, "slices", slices)
    swept = homotopy_area(curves, surface)
    q = -swept / surface.total_area
    d = int(round(q))
    return d, abs(q - d)


def degree(slices, surface, max_residual=0.05):
    d, r = degree_with_residual(slices, surface)
    if r > max_residual:
        raise AmbiguousDegree(f"degree residual {r:.3g} exceeds {max_residual}", d, r)
    return d, r
