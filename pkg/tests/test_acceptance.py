"""Acceptance suite: one PASS/FAIL line per criterion.

Run under pytest (lines are collected into the terminal summary) or directly
with ``python3 tests/test_acceptance.py``.
"""
import math
import os
import subprocess
import sys
import tempfile
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from cgcurves import curve as C  # noqa: E402
from cgcurves import verify as V  # noqa: E402
from cgcurves.action import ActionParams, degree  # noqa: E402
from cgcurves.continuation import DEFAULT_EPS, continue_in_eps  # noqa: E402
from cgcurves.minmax import MinMaxConfig, tighten_band  # noqa: E402
from cgcurves.surface import SurfaceModel  # noqa: E402
from cgcurves.sweepout import constant_sweepout, latitude_sweepout  # noqa: E402
from helpers import gradient_fd_error  # noqa: E402

KAPPAS = (0.5, 1.0, 2.0)
SPHERE = SurfaceModel.sphere(1.0)
ELLIPSOID = SurfaceModel.ellipsoid(1.0, 1.0, 1.3)
CFG = MinMaxConfig(M=256, T=64)


def exact_length(k):
    return 2 * math.pi / math.sqrt(1 + k * k)


def exact_omega(k):
    return 2 * math.pi * (math.sqrt(1 + k * k) - k)


class Runs:
    """Continuation runs shared by several criteria, computed once."""

    def __init__(self):
        self._sphere = {}
        self._ellipsoid = None

    def sphere(self, k):
        if k not in self._sphere:
            t0 = time.perf_counter()
            rep = continue_in_eps(SPHERE, k, DEFAULT_EPS, CFG)
            self._sphere[k] = (rep, time.perf_counter() - t0)
        return self._sphere[k]

    def ellipsoid(self):
        if self._ellipsoid is None:
            self._ellipsoid = continue_in_eps(ELLIPSOID, 0.5, DEFAULT_EPS, CFG)
        return self._ellipsoid


def criterion_1(runs):
    ok, parts = True, []
    for k in KAPPAS:
        rep, secs = runs.sphere(k)
        rel = abs(rep.length - exact_length(k)) / exact_length(k)
        good = rel < 5e-3 and rep.cgc_residual_sup < 1e-2 * k and secs < 120
        ok &= good
        parts.append(f"k={k:g} len={rep.length:.5f} (rel {rel:.1e}) res={rep.cgc_residual_sup:.1e}"
                     f" {secs:.1f}s")
    return ok, "; ".join(parts)


def criterion_2(runs):
    ok, parts = True, []
    for k in KAPPAS:
        rep, _ = runs.sphere(k)
        rel = abs(rep.omega_estimate - exact_omega(k)) / exact_omega(k)
        ok &= rel < 0.02
        parts.append(f"k={k:g} omega={rep.omega_estimate:.5f} vs {exact_omega(k):.5f} (rel {rel:.1e})")
    return ok, "; ".join(parts)


def criterion_3(runs):
    ratios = [runs.sphere(k)[0].omega_estimate / k for k in KAPPAS]
    sweep = [runs.sphere(k)[0].sweepout_omega / k for k in KAPPAS]
    viol = sum(b >= a for a, b in zip(ratios, ratios[1:]))
    viol += sum(b >= a for a, b in zip(sweep, sweep[1:]))
    return viol == 0, ("omega/kappa " + ", ".join(f"{r:.4f}" for r in ratios)
                       + f"; violations {viol}")


def criterion_4(runs):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(100):
        surf = SPHERE if i % 2 == 0 else ELLIPSOID
        u = V.random_curve(surf, 64, rng)
        params = ActionParams(rng.uniform(0.0, 2.0), rng.uniform(0.01, 0.5))
        worst = max(worst, gradient_fd_error(u, surf, params, rng.normal(size=u.shape)))
    secs = time.perf_counter() - t0
    return worst < 1e-5 and secs < 30, f"worst relative error {worst:.1e} in {secs:.1f}s"


def criterion_5(runs):
    cfg = V.FuzzConfig(sample_count=100_000, seed=0)
    t0 = time.perf_counter()
    c = V.coercivity_fuzz(cfg)
    h = V.hoelder_fuzz(cfg)
    secs = time.perf_counter() - t0
    ok = c["violations"] == 0 and h["violations"] == 0 and secs < 10
    return ok, (f"coercivity violations {c['violations']} (worst ratio {c['worst_ratio']:.3f}),"
                f" hoelder violations {h['violations']} (max ratio {h['max_ratio']:.3f}) {secs:.2f}s")


def criterion_6(runs):
    r = V.hemisphere_routes(SPHERE, 64, 32)
    fuzz = V.area_mod_fuzz(SPHERE, V.FuzzConfig(sample_count=10, seed=0))
    tol = 1e-6 * 4 * math.pi
    ok = (abs(r["reparam_difference"]) < tol
          and abs(abs(r["route_difference"]) - 4 * math.pi) < 1e-3
          and fuzz["violations"] == 0)
    return ok, (f"homotopic difference {abs(r['reparam_difference']):.1e},"
                f" route difference {r['route_difference']:.6f}, fuzz violations {fuzz['violations']}")


def criterion_7(runs):
    worst_std = worst_rel = 0.0
    count = 0
    reports = [runs.sphere(k)[0] for k in KAPPAS] + [runs.ellipsoid()]
    for rep in reports:
        for stage, u in zip(rep.stages, rep.stage_curves):
            o = V.constant_speed_oracle(u, ActionParams(rep.kappa, stage["eps"]))
            worst_std = max(worst_std, C.speed_stats(u)[1], o["h_rel_std"])
            worst_rel = max(worst_rel, o["relation_error"])
            count += 1
    ok = worst_std < 1e-4 and worst_rel < 1e-8
    return ok, f"{count} curves: max speed rel std {worst_std:.1e}, tau relation error {worst_rel:.1e}"


def criterion_8(runs):
    s = latitude_sweepout(SPHERE, 128, 32)
    d1, r1 = degree(s.slices, SPHERE)
    d2, r2 = degree(s.reversed().slices, SPHERE)
    d0, r0 = degree(constant_sweepout(SPHERE, 32, 8).slices, SPHERE)
    t = tighten_band(s, ActionParams(1.0, 0.1), 1.0, 0.05, 500)
    d3, r3 = degree(t.slices, SPHERE)
    ok = (d1, d2, d0, d3) == (1, -1, 0, 1) and max(r0, r1, r2, r3) < 1e-3
    return ok, (f"latitude {d1}, reversed {d2}, constant {d0}, after 500 passes {d3};"
                f" max residual {max(r0, r1, r2, r3):.1e}")


def criterion_9(runs):
    rep = runs.ellipsoid()
    ok = (rep.failed_index < 0 and rep.grad_sup < CFG.tol_grad and rep.cgc_residual_sup < 1e-3
          and rep.length >= CFG.eta1)
    return ok, (f"grad {rep.grad_sup:.1e}, cgc residual {rep.cgc_residual_sup:.1e},"
                f" length {rep.length:.5f}")


def criterion_10(runs):
    with tempfile.TemporaryDirectory() as tmp:
        args = [sys.executable, "-m", "cgcurves", "solve", "--kappa", "1", "--nodes", "128",
                "--slices", "32", "--seed", "7", "--out", tmp]
        outputs = []
        for _ in range(2):
            subprocess.run(args, check=True, capture_output=True)
            outputs.append({n: open(os.path.join(tmp, n), "rb").read() for n in sorted(os.listdir(tmp))})
    same = outputs[0] == outputs[1]
    return same, f"{len(outputs[0])} artifacts {'identical' if same else 'differ'} across runs"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10]


def report_line(n, ok, detail):
    return f"CRITERION {n}: {'PASS' if ok else 'FAIL'} {detail}"


@pytest.fixture(scope="session")
def runs():
    return Runs()


@pytest.mark.parametrize("n", range(1, 11))
def test_criterion(n, runs):
    from conftest import ACCEPTANCE_LINES
    ok, detail = CRITERIA[n - 1](runs)
    line = report_line(n, ok, detail)
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


if __name__ == "__main__":
    shared = Runs()
    failed = 0
    for n, fn in enumerate(CRITERIA, start=1):
        ok, detail = fn(shared)
        failed += not ok
        print(report_line(n, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
