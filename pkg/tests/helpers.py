"""Shared constructors and checks for the test suite."""
import numpy as np

from cgcurves.action import area_increment, gradient, pairing
from cgcurves.curve import perturbed_length
from cgcurves.verify import latitude_path, random_curve


def wobbly_curve(surface, M, rng, amplitude=0.15):
    return random_curve(surface, M, rng, amplitude)


def north_route_ledger(surface, phi, M, steps=64):
    """Ledger value of the latitude at ``phi`` reached from the north pole."""
    from cgcurves.action import homotopy_area
    path = latitude_path(surface, M, np.linspace(0.0, phi, steps + 1))
    return homotopy_area(path, surface), path[-1]


def random_tangent(surface, X, rng):
    return surface.tangent_projector(X, rng.normal(size=X.shape))


def _action_along(u, surface, params, psi, h):
    """Central difference of the action along project(u + s psi) at s = 0."""
    vals = []
    for s in (h, -h):
        w = surface.project(u + s * psi)
        vals.append(perturbed_length(w, params.eps) + params.kappa * area_increment(u, w, surface))
    return (vals[0] - vals[1]) / (2 * h)


def gradient_fd_error(u, surface, params, psi):
    """Relative error of the gradient pairing against the best of several step sizes."""
    g = gradient(u, params, surface)
    exact = pairing(u, g, psi)
    errs = [abs(_action_along(u, surface, params, psi, h) - exact) for h in np.geomspace(1e-2, 1e-6, 9)]
    return min(errs) / max(abs(exact), 1e-12)
