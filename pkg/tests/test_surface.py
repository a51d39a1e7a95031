import math

import numpy as np
import pytest

from cgcurves.errors import DegeneratePoint, NonTangentInput, PointOutsideTube, ConfigError
from cgcurves.surface import SurfaceModel


def random_surface_points(surface, rng, n):
    d = rng.normal(size=(n, 3))
    return surface.project(d / np.linalg.norm(d, axis=1, keepdims=True) * max(surface.axes))


def test_project_sphere_radial(sphere):
    assert np.allclose(sphere.project([2.0, 0.0, 0.0]), [1.0, 0.0, 0.0])


def test_project_center_is_degenerate(sphere, ellipsoid):
    with pytest.raises(DegeneratePoint):
        sphere.project([0.0, 0.0, 0.0])
    with pytest.raises(DegeneratePoint):
        ellipsoid.project([0.0, 0.0, 0.0])


def test_project_outside_tube(sphere):
    with pytest.raises(PointOutsideTube):
        sphere.project([2.5, 0.0, 0.0])


def test_project_ellipsoid_pole(ellipsoid):
    assert np.allclose(ellipsoid.project([0.0, 0.0, 2.0]), [0.0, 0.0, 1.3], atol=1e-14)


def test_project_ellipsoid_against_brute_force(ellipsoid, rng):
    # dense parameter grid plus local polish of the best sample
    a, b, c = ellipsoid.axes
    ph = np.linspace(0, np.pi, 1001)
    th = np.linspace(0, 2 * np.pi, 1000, endpoint=False)
    P, Th = np.meshgrid(ph, th, indexing="ij")
    grid = np.stack([a * np.sin(P) * np.cos(Th), b * np.sin(P) * np.sin(Th), c * np.cos(P)], -1).reshape(-1, 3)
    for _ in range(5):
        y = random_surface_points(ellipsoid, rng, 1)[0] * rng.uniform(0.7, 1.3)
        x = ellipsoid.project(y)
        best = grid[np.argmin(np.linalg.norm(grid - y, axis=1))]
        assert np.linalg.norm(x - y) <= np.linalg.norm(best - y) + 1e-12
        assert np.linalg.norm(x - best) < 1e-2


def test_projection_on_surface_and_idempotent(ellipsoid, rng):
    y = rng.normal(size=(500, 3))
    y = y / np.linalg.norm(y, axis=1, keepdims=True) * rng.uniform(0.9, 1.2, size=(500, 1))
    x = ellipsoid.project(y)
    assert np.max(np.abs(ellipsoid.implicit(x))) < 1e-12
    assert np.max(np.abs(ellipsoid.project(x) - x)) < 1e-14
    # nearest point: y - x is normal
    r = y - x
    n = ellipsoid.normal(x)
    tang = r - n * np.sum(r * n, axis=1, keepdims=True)
    assert np.max(np.linalg.norm(tang, axis=1)) < 1e-12


def test_tangent_projector(sphere, ellipsoid, rng):
    assert np.allclose(sphere.tangent_projector([0, 0, 1.0], [1.0, 2.0, 3.0]), [1.0, 2.0, 0.0])
    p = random_surface_points(ellipsoid, rng, 100)
    v = rng.normal(size=(100, 3))
    w = ellipsoid.tangent_projector(p, v)
    grad = p / np.asarray(ellipsoid.axes) ** 2
    assert np.max(np.abs(np.sum(w * grad, axis=1))) < 1e-12
    assert np.allclose(ellipsoid.tangent_projector(p, w), w, atol=1e-14)
    # symmetric bilinear form
    u = rng.normal(size=(100, 3))
    assert np.allclose(np.sum(ellipsoid.tangent_projector(p, v) * u, axis=1),
                       np.sum(v * ellipsoid.tangent_projector(p, u), axis=1))


def fd_second_fundamental_form(surface, p, v, h=1e-4):
    g = lambda t: surface.project(p + t * v)
    acc = (g(h) - 2 * g(0.0) + g(-h)) / (h * h)
    n = surface.normal(p)
    return np.dot(acc, n) * n


def test_second_fundamental_form_north_pole(sphere):
    A = sphere.second_fundamental_form([0, 0, 1.0], [1.0, 0, 0], [1.0, 0, 0])
    assert np.allclose(A, [0, 0, -1.0])
    assert np.allclose(fd_second_fundamental_form(sphere, np.array([0, 0, 1.0]), np.array([1.0, 0, 0])),
                       [0, 0, -1.0], atol=1e-6)
    assert np.allclose(sphere.second_fundamental_form([0, 0, 1.0], [0, 0, 0.0], [1.0, 0, 0]), 0.0)


def test_second_fundamental_form_ellipsoid_fd(ellipsoid, rng):
    for p in random_surface_points(ellipsoid, rng, 10):
        v = ellipsoid.tangent_projector(p, rng.normal(size=3))
        fd = fd_second_fundamental_form(ellipsoid, p, v)
        assert np.allclose(ellipsoid.second_fundamental_form(p, v, v), fd, atol=1e-6)


def test_second_fundamental_form_properties(sphere, ellipsoid, rng):
    for surf in (sphere, ellipsoid):
        p = random_surface_points(surf, rng, 200)
        v = surf.tangent_projector(p, rng.normal(size=(200, 3)))
        w = surf.tangent_projector(p, rng.normal(size=(200, 3)))
        A = surf.second_fundamental_form(p, v, w)
        assert np.allclose(A, surf.second_fundamental_form(p, w, v))
        assert np.max(np.abs(np.sum(A * w, axis=1))) < 1e-10
    p = random_surface_points(sphere, rng, 200)
    v = sphere.tangent_projector(p, rng.normal(size=(200, 3)))
    A = sphere.second_fundamental_form(p, v, v)
    assert np.allclose(A, -np.sum(v * v, axis=1, keepdims=True) * p, atol=1e-10)


def test_second_fundamental_form_rejects_normal_input(sphere):
    with pytest.raises(NonTangentInput):
        sphere.second_fundamental_form([0, 0, 1.0], [0, 0, 1.0], [1.0, 0, 0])


def test_rotate90(sphere, ellipsoid, rng):
    assert np.allclose(sphere.rotate90([0, 0, 1.0], [1.0, 0, 0]), [0, 1.0, 0])
    p = random_surface_points(ellipsoid, rng, 10_000)
    v = ellipsoid.tangent_projector(p, rng.normal(size=(10_000, 3)))
    q = ellipsoid.rotate90(p, v)
    assert np.allclose(np.linalg.norm(q, axis=1), np.linalg.norm(v, axis=1))
    assert np.max(np.abs(np.sum(q * v, axis=1))) < 1e-12
    assert np.allclose(ellipsoid.rotate90(p, q), -v, atol=1e-12)
    with pytest.raises(NonTangentInput):
        sphere.rotate90([0, 0, 1.0], [0, 0, 1.0])


def test_volume_form(sphere, ellipsoid, rng):
    X = np.array([1.0, 0, 0])
    Y = np.array([0, 1.0, 0])
    pole = [0, 0, 1.0]
    assert sphere.volume_form(pole, X, X) == 0.0
    # Vol(X, Y) = X . Q(Y) with Q = n x (.)
    assert sphere.volume_form(pole, X, Y) == pytest.approx(-1.0)
    assert sphere.volume_form(pole, Y, X) == pytest.approx(1.0)
    assert sphere.volume_form(pole, 2 * X, 3 * Y) == pytest.approx(6 * sphere.volume_form(pole, X, Y))
    p = random_surface_points(ellipsoid, rng, 100)
    v = ellipsoid.tangent_projector(p, rng.normal(size=(100, 3)))
    w = ellipsoid.tangent_projector(p, rng.normal(size=(100, 3)))
    trip = np.sum(np.cross(w, v) * ellipsoid.normal(p), axis=1)
    assert np.allclose(ellipsoid.volume_form(p, v, w), trip)
    assert np.allclose(ellipsoid.volume_form(p, v, w), -ellipsoid.volume_form(p, w, v))


def test_tangency_of_projection(ellipsoid, rng):
    p = random_surface_points(ellipsoid, rng, 10_000)
    v = ellipsoid.tangent_projector(p, rng.normal(size=(10_000, 3)))
    errs = []
    for t in (1e-2, 5e-3):
        d = ellipsoid.project(p + t * v) - p - t * v
        errs.append(np.max(np.linalg.norm(d, axis=1) / np.maximum(np.sum(v * v, axis=1), 1e-12)) / t ** 2)
    assert errs[1] < 2 * errs[0] + 1e-6  # O(t^2)


def test_total_area(sphere, ellipsoid):
    assert sphere.total_area == pytest.approx(4 * math.pi, rel=1e-12)
    assert SurfaceModel.sphere(2.0).total_area == 16 * math.pi
    a, c = 1.0, 1.3
    e = math.sqrt(1 - a * a / (c * c))
    prolate = 2 * math.pi * a * a * (1 + c / (a * e) * math.asin(e))
    assert ellipsoid.total_area == pytest.approx(prolate, rel=1e-8)
    tri = SurfaceModel.ellipsoid(1.0, 1.2, 1.5)
    from scipy.special import ellipeinc, ellipkinc
    # Legendre form of the triaxial ellipsoid area, c >= b >= a ordering
    C, B, A = 1.5, 1.2, 1.0
    phi = math.acos(A / C)
    k2 = (C * C * (B * B - A * A)) / (B * B * (C * C - A * A))
    ref = 2 * math.pi * A * A + 2 * math.pi * B * C / math.sin(phi) * (
        ellipeinc(phi, k2) * math.sin(phi) ** 2 + ellipkinc(phi, k2) * math.cos(phi) ** 2)
    assert tri.total_area == pytest.approx(ref, rel=1e-8)


def test_tube_radius(sphere, ellipsoid):
    assert sphere.tube_radius == 1.0
    assert ellipsoid.tube_radius == pytest.approx(1.0 / 1.3)


def test_from_config():
    s = SurfaceModel.from_config({"kind": "sphere", "radius": 2.0})
    assert s.axes == (2.0, 2.0, 2.0)
    e = SurfaceModel.from_config({"kind": "ellipsoid", "axes": [1.0, 1.0, 1.3]})
    assert e.axes == (1.0, 1.0, 1.3)
    with pytest.raises(ConfigError):
        SurfaceModel.from_config({"kind": "torus"})
    with pytest.raises(ConfigError):
        SurfaceModel.from_config({"kind": "ellipsoid", "axes": [1.0, -1.0, 1.0]})
