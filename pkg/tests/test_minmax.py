import math

import numpy as np
import pytest

from cgcurves import curve as C
from cgcurves.action import ActionParams, degree
from cgcurves.errors import NoConvergence, ScheduleUnderflow
from cgcurves.minmax import (MinMaxConfig, band_cutoff, minmax_solve, monotonicity_scan,
                             stable_step, struwe_schedule, tighten_band)
from cgcurves.sweepout import action_profile, latitude_sweepout


def test_struwe_schedule():
    assert struwe_schedule(1.0, 1.0, 1) == pytest.approx(0.75)
    vals = [struwe_schedule(1.0, 1.0, n) for n in (1, 2, 10, 1000)]
    assert all(b > a for a, b in zip(vals, vals[1:])) and vals[-1] < 1.0
    assert vals[-1] == pytest.approx(1.0, abs=1e-3)
    with pytest.raises(ScheduleUnderflow):
        struwe_schedule(0.1, 1.0, 1)


def test_band_cutoff():
    assert band_cutoff(10.0, 10.0, 2.0) == 1.0
    assert band_cutoff(9.0, 10.0, 2.0) == 1.0
    assert band_cutoff(8.5, 10.0, 2.0) == pytest.approx(0.5)
    assert band_cutoff(8.0, 10.0, 2.0) == 0.0
    assert band_cutoff(10.0, 10.0, 0.0) == 0.0


def test_stable_step_scales_with_grid(sphere):
    a = stable_step(C.latitude(sphere, 1.0, 64).nodes, 0.1)
    b = stable_step(C.latitude(sphere, 1.0, 128).nodes, 0.1)
    assert b == pytest.approx(a / 4, rel=1e-3)


def test_config_validation():
    with pytest.raises(ValueError):
        MinMaxConfig(M=9)
    with pytest.raises(ValueError):
        MinMaxConfig(tol_grad=0.0)


def test_empty_band_is_identity(sphere):
    s = latitude_sweepout(sphere, 32, 16)
    t = tighten_band(s, ActionParams(1.0, 0.1), 0.0, 0.05, 10)
    assert np.array_equal(s.slices, t.slices)
    assert t is not s


def test_tightening_monotone_and_admissible(sphere):
    s = latitude_sweepout(sphere, 64, 32)
    params = ActionParams(1.0, 0.1)
    maxima = [action_profile(s, params).max()]

    def record(p, out, prof):
        maxima.append(prof.max())
        assert degree(out.slices, sphere)[0] == 1

    t = tighten_band(s, params, 1.0, 0.05, 30, on_pass=record)
    assert all(b <= a + 1e-12 for a, b in zip(maxima, maxima[1:]))
    assert np.array_equal(t.slices[0], s.slices[0]) and np.array_equal(t.slices[-1], s.slices[-1])
    assert maxima[-1] < maxima[0]
    # the pass-by-pass profile agrees with a fresh evaluation
    assert action_profile(t, params).max() == pytest.approx(maxima[-1], abs=1e-8)


def test_already_critical_sweepout_barely_moves(sphere):
    # slice 16 of 64 sits exactly at colatitude pi/4, the kappa = 1 critical latitude
    s = latitude_sweepout(sphere, 256, 64)
    params = ActionParams(1.0, 1e-3)
    maxima = []
    tighten_band(s, params, 0.05, 0.05, 5, on_pass=lambda p, o, prof: maxima.append(prof.max()))
    start = action_profile(s, params).max()
    drops = np.diff([start] + maxima)
    assert np.all(drops <= 1e-12) and np.all(drops > -1e-6)


def test_geodesic_flow_keeps_equator(sphere):
    s = latitude_sweepout(sphere, 64, 32)
    params = ActionParams(0.0, 0.1)
    t = tighten_band(s, params, 0.5, 0.05, 200)
    assert np.allclose(t.slices[16], s.slices[16], atol=1e-12)
    prof = action_profile(t, params)
    assert prof.max() == pytest.approx(C.perturbed_length(s.slices[16], 0.1), rel=1e-9)


def test_minmax_sphere_kappa_one(sphere):
    rep = minmax_solve(sphere, ActionParams(1.0, 1e-3), MinMaxConfig(M=256, T=64))
    assert rep.converged
    ex = rep.extracted
    assert C.length(ex.curve) == pytest.approx(2 * math.pi / math.sqrt(2), rel=5e-3)
    assert rep.omega_estimate == pytest.approx(2 * math.pi * (math.sqrt(2) - 1), rel=0.02)
    assert ex.grad_sup < 1e-8 and C.speed_stats(ex.curve)[1] < 1e-4
    assert rep.diagnostics["eta1_ok"]
    data = rep.to_json("curve.csv")
    assert data["extracted"]["csv_path"] == "curve.csv"
    assert data["extracted"]["L_eps"] >= 0.1


def test_minmax_sphere_geodesic(sphere):
    rep = minmax_solve(sphere, ActionParams(0.0, 0.01), MinMaxConfig(M=128, T=32))
    assert C.length(rep.extracted.curve) == pytest.approx(2 * math.pi, rel=5e-3)


def test_minmax_ellipsoid(ellipsoid):
    cfg = MinMaxConfig(M=128, T=32)
    rep = minmax_solve(ellipsoid, ActionParams(0.5, 0.1), cfg)
    assert rep.extracted.grad_sup < cfg.tol_grad
    assert C.speed_stats(rep.extracted.curve)[1] < 1e-4


def test_minmax_reports_failure(sphere):
    cfg = MinMaxConfig(M=32, T=16, tol_grad=1e-30, max_iterations=1, newton_max_iter=2)
    with pytest.raises(NoConvergence) as info:
        minmax_solve(sphere, ActionParams(1.0, 0.1), cfg)
    rep = info.value.report
    assert rep.iterations == 1 and len(rep.history) == 2 and not rep.converged


def test_struwe_warm_start(sphere):
    cfg = MinMaxConfig(M=64, T=32, struwe_n=2)
    rep = minmax_solve(sphere, ActionParams(1.0, 0.1), cfg)
    assert rep.converged


def test_monotonicity_scan(sphere):
    cfg = MinMaxConfig(M=128, T=64)
    rows, verdict = monotonicity_scan(sphere, 1e-3, [0.5, 1.0, 2.0], cfg)
    assert verdict == "PASS"
    expected = [2 * math.pi * (math.sqrt(1 + k * k) - k) / k for k in (0.5, 1.0, 2.0)]
    for (k, w, r, ok), e in zip(rows, expected):
        assert ok and r == pytest.approx(e, rel=0.02)
    assert monotonicity_scan(sphere, 0.1, [1.0], MinMaxConfig(M=64, T=32))[1] == "PASS"
    with pytest.raises(ValueError):
        monotonicity_scan(sphere, 0.1, [1.0, 0.5])


def test_scan_partial(sphere):
    cfg = MinMaxConfig(M=32, T=16, tol_grad=1e-30, max_iterations=1, newton_max_iter=2)
    rows, verdict = monotonicity_scan(sphere, 0.1, [0.5, 1.0], cfg)
    assert verdict == "SKIPPED-PARTIAL" and not any(r[3] for r in rows)


def test_large_eps_bound(sphere):
    cfg = MinMaxConfig(M=64, T=32)
    for k in (0.5, 1.0):
        hi = minmax_solve(sphere, ActionParams(k, 0.5), cfg).omega_estimate
        lo = minmax_solve(sphere, ActionParams(k, 0.05), cfg).omega_estimate
        assert lo <= hi + 2 * math.pi
