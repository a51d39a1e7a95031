"""Embedded 2-spheres in R^3: closest-point projection and tangent geometry.

Orientation: ``Q(v) = n x v`` with ``n`` the outward unit normal, and the
area form is ``Vol(X, Y) = X . Q(Y) = n . (Y x X)``.  With this choice the
enclosed-area integrand of a homotopy f(t, theta) is ``Vol(f_t, f_theta)``,
and a sweep from the north pole to the south pole covers area ``-Area(S^2)``.
"""
from dataclasses import dataclass
from functools import cached_property
import math

import numpy as np

from . import kernels
from .errors import ConfigError, DegeneratePoint, NonTangentInput, PointOutsideTube

TANGENT_TOL = 1e-8


def _ellipsoid_area(a, b, c, n_z=200, n_theta=512):
    """Area of the ellipsoid x^2/a^2 + y^2/b^2 + z^2/c^2 = 1.

    Parametrizing by (z/c, theta) makes the area element
    sqrt(c^2 (1 - s^2)(b^2 cos^2 + a^2 sin^2) + a^2 b^2 s^2), which is smooth,
    so Gauss-Legendre in s and the trapezoid rule in theta converge fast.
    """
    s, ws = np.polynomial.legendre.leggauss(n_z)
    th = 2.0 * np.pi * np.arange(n_theta) / n_theta
    S = s[:, None]
    TH = th[None, :]
    dens = np.sqrt(c * c * (1.0 - S * S) * (b * b * np.cos(TH) ** 2 + a * a * np.sin(TH) ** 2)
                   + a * a * b * b * S * S)
    return float(np.sum(ws[:, None] * dens) * (2.0 * np.pi / n_theta))


@dataclass(frozen=True)
class SurfaceModel:
    """Round sphere (``kind='sphere'``) or axis-aligned ellipsoid.

    ``axes`` holds the three semi-axes; for the sphere all equal the radius.
    """

    kind: str
    axes: tuple

    def __post_init__(self):
        if self.kind not in ("sphere", "ellipsoid"):
            raise ConfigError(f"surface.kind: unknown surface kind {self.kind!r}")
        axes = tuple(float(x) for x in self.axes)
        if len(axes) != 3 or min(axes) <= 0.0:
            raise ConfigError("surface.axes: need three positive semi-axes")
        if self.kind == "sphere" and not (axes[0] == axes[1] == axes[2]):
            raise ConfigError("surface.radius: sphere needs equal axes")
        object.__setattr__(self, "axes", axes)

    @classmethod
    def sphere(cls, radius=1.0):
        return cls("sphere", (radius, radius, radius))

    @classmethod
    def ellipsoid(cls, a, b, c):
        return cls("ellipsoid", (a, b, c))

    @classmethod
    def from_config(cls, cfg):
        """Build from ``{"kind": "sphere", "radius": r}`` or ``{"kind": "ellipsoid", "axes": [a, b, c]}``."""
        if not isinstance(cfg, dict) or "kind" not in cfg:
            raise ConfigError("surface.kind: missing")
        kind = cfg["kind"]
        try:
            if kind == "sphere":
                return cls.sphere(float(cfg.get("radius", 1.0)))
            if kind == "ellipsoid":
                axes = cfg["axes"]
                if isinstance(axes, str):
                    axes = [float(x) for x in axes.split(",")]
                return cls.ellipsoid(*[float(x) for x in axes])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"surface: {exc}") from exc
        raise ConfigError(f"surface.kind: unknown surface kind {kind!r}")

    def to_config(self):
        if self.kind == "sphere":
            return {"kind": "sphere", "radius": self.axes[0]}
        return {"kind": "ellipsoid", "axes": list(self.axes)}

    @property
    def is_sphere(self):
        return self.kind == "sphere"

    @cached_property
    def tube_radius(self):
        if self.is_sphere:
            return self.axes[0]
        return min(self.axes) ** 2 / max(self.axes)

    @cached_property
    def total_area(self):
        if self.is_sphere:
            return 4.0 * math.pi * self.axes[0] ** 2
        return _ellipsoid_area(*self.axes)

    @property
    def params(self):
        """Flat tuple handed to the compiled kernels."""
        a, b, c = self.axes
        return (0 if self.is_sphere else 1, a, b, c, self.tube_radius)

    # ------------------------------------------------------------------
    def implicit(self, x):
        """Level-set function sum(x_i^2/a_i^2) - 1 (zero on the surface)."""
        x = np.asarray(x, dtype=float)
        return np.sum((x / np.asarray(self.axes)) ** 2, axis=-1) - 1.0

    def project(self, y):
        """Nearest surface point(s) of ``y`` (shape (3,) or (..., 3))."""
        y = np.asarray(y, dtype=float)
        X, _, status = kernels.project_points(y, self.params)
        if status == kernels.STATUS_DEGENERATE:
            raise DegeneratePoint("no unique nearest point (point at the centre)")
        if status == kernels.STATUS_OUTSIDE:
            raise PointOutsideTube("point farther than tube_radius from the surface")
        return X.reshape(y.shape)

    def normal(self, p):
        """Outward unit normal at surface point(s) ``p``."""
        m = np.asarray(p, dtype=float) / np.asarray(self.axes) ** 2
        return m / np.linalg.norm(m, axis=-1, keepdims=True)

    def tangent_projector(self, p, v):
        n = self.normal(p)
        v = np.asarray(v, dtype=float)
        return v - n * np.sum(n * v, axis=-1, keepdims=True)

    def _check_tangent(self, p, *vs):
        n = self.normal(p)
        for v in vs:
            v = np.asarray(v, dtype=float)
            off = np.abs(np.sum(n * v, axis=-1))
            scale = np.maximum(1.0, np.linalg.norm(v, axis=-1))
            if np.any(off > TANGENT_TOL * scale):
                raise NonTangentInput("vector is not tangent to the surface")

    def second_fundamental_form(self, p, v, w, check=True):
        """Normal-valued A_p(v, w) = -(v^T H w / |grad phi|) n for the level set phi."""
        if check:
            self._check_tangent(p, v, w)
        p = np.asarray(p, dtype=float)
        inv2 = 1.0 / np.asarray(self.axes) ** 2
        grad_norm = 2.0 * np.linalg.norm(p * inv2, axis=-1, keepdims=True)
        hvw = 2.0 * np.sum(np.asarray(v) * inv2 * np.asarray(w), axis=-1, keepdims=True)
        return -(hvw / grad_norm) * self.normal(p)

    def rotate90(self, p, v, check=True):
        if check:
            self._check_tangent(p, v)
        return np.cross(self.normal(p), np.asarray(v, dtype=float))

    def volume_form(self, p, X, Y, check=True):
        """Vol(X, Y) = X . Q(Y)."""
        if check:
            self._check_tangent(p, X, Y)
        return np.sum(np.asarray(X, dtype=float) * self.rotate90(p, Y, check=False), axis=-1)
