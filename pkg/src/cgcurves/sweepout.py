"""Sweepouts: families of closed curves from a point to a point of degree 1."""
import json

import numpy as np

from . import action
from .curve import nodes_of, perturbed_length
from .errors import AmbiguousDegree, CurvesTooFar

POINT_TOL = 1e-10


class Sweepout:
    """Slices ``gamma(t_i)``, t_i = i/T, with ledger values from the t=0 end.

    ``slices`` is stored as one array of shape (T+1, M, 3).
    """

    def __init__(self, slices, surface, ledger_values=None):
        S = np.array([nodes_of(s) for s in slices], dtype=float)
        if S.ndim != 3 or S.shape[2] != 3:
            raise ValueError("slices must have shape (T+1, M, 3)")
        self.slices = S
        self.surface = surface
        if ledger_values is None:
            ledger_values = action.cumulative_areas(S, surface)
        self.ledger_values = np.array(ledger_values, dtype=float)

    @property
    def T(self):
        return self.slices.shape[0] - 1

    @property
    def M(self):
        return self.slices.shape[1]

    def copy(self):
        return Sweepout(self.slices.copy(), self.surface, self.ledger_values.copy())

    def reversed(self):
        return Sweepout(self.slices[::-1].copy(), self.surface)

    def recompute_ledger(self):
        self.ledger_values = action.cumulative_areas(self.slices, self.surface)
        return self.ledger_values

    def adjacency(self):
        """Sup-norm distances between consecutive slices."""
        d = np.linalg.norm(np.diff(self.slices, axis=0), axis=2)
        return d.max(axis=1)

    def to_json(self):
        return {"T": self.T, "M": self.M,
                "slices": self.slices.tolist(),
                "ledger": self.ledger_values.tolist()}

    def dump(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)

    @classmethod
    def load(cls, path, surface):
        with open(path) as fh:
            data = json.load(fh)
        return cls(np.array(data["slices"]), surface, data.get("ledger"))


def latitude_sweepout(surface, M, T):
    """Latitude family from the north pole (t=0) to the south pole (t=1).

    Slice i is the (scaled) latitude at colatitude pi*i/T, traversed
    counterclockwise seen from above; on an ellipsoid the scaled circles
    lie exactly on the surface.
    """
    a, b, c = surface.axes
    th = 2.0 * np.pi * np.arange(M) / M
    phi = np.pi * np.arange(T + 1) / T
    sp = np.sin(phi)[:, None]
    S = np.stack([a * sp * np.cos(th)[None, :], b * sp * np.sin(th)[None, :],
                  c * np.cos(phi)[:, None] * np.ones(M)[None, :]], axis=2)
    S[0] = np.array([0.0, 0.0, c])
    S[T] = np.array([0.0, 0.0, -c])
    return Sweepout(S, surface)


def constant_sweepout(surface, M, T, point=None):
    p = np.array([0.0, 0.0, surface.axes[2]]) if point is None else np.asarray(point, float)
    return Sweepout(np.broadcast_to(p, (T + 1, M, 3)).copy(), surface)


def action_profile(s, params):
    """profile[i] = L_eps(slice i) + kappa * ledger_values[i]."""
    L = np.array([perturbed_length(x, params.eps) for x in s.slices])
    return L + params.kappa * s.ledger_values


def max_slice(s, params, profile=None):
    """Index and value of the profile maximum (first index on ties)."""
    if profile is None:
        profile = action_profile(s, params)
    i = int(np.argmax(profile))
    return i, float(profile[i])


def validate(s, expected_degree=1, max_residual=0.05):
    """Check constant end slices, adjacency and degree; returns (degree, residual)."""
    surface = s.surface
    for end in (0, s.T):
        spread = np.ptp(s.slices[end], axis=0).max()
        if spread > POINT_TOL:
            raise ValueError(f"end slice {end} is not a point curve (spread {spread:.2e})")
    adj = s.adjacency()
    bad = np.nonzero(adj >= 0.5 * surface.tube_radius)[0]
    if len(bad):
        raise CurvesTooFar(f"slices {bad[0]} and {bad[0] + 1} are {adj[bad[0]]:.3g} apart")
    d, r = action.degree(s.slices, surface, max_residual)
    if expected_degree is not None and d != expected_degree:
        raise AmbiguousDegree(f"degree {d}, expected {expected_degree}", d, r)
    return d, r
