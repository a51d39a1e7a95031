"""Sweepout tightening, min-max estimation and extraction of critical slices."""
from dataclasses import dataclass, field
import logging
import math

import numpy as np

from . import kernels
from .action import ActionParams, area_increment, degree_with_residual, gradient
from .critical import RefineResult, refine
from .curve import perturbed_length, resample_arclength, speed_stats
from .errors import DegreeLost, NoConvergence, ScheduleUnderflow, StepTooLarge
from .sweepout import Sweepout, action_profile, latitude_sweepout, max_slice

log = logging.getLogger(__name__)

ARMIJO = 1e-4
SPEED_STD_TOL = 1e-4


@dataclass
class MinMaxConfig:
    """Resolution, tolerances and iteration budgets of the min-max solver."""

    M: int = 256
    T: int = 64
    tol_grad: float = 1e-8
    c_cfg: float = 1.0
    eta1: float = 0.1
    max_iterations: int = 20
    passes_per_iteration: int = 10
    step: float = 0.05
    newton_max_iter: int = 40
    resample_every: int = 25
    ledger_every: int = 100
    validate_every: int = 1
    struwe_n: int = 0

    def __post_init__(self):
        if self.M < 8 or self.M % 2:
            raise ValueError("M must be even and >= 8")
        if self.T < 2:
            raise ValueError("T must be >= 2")
        for name in ("tol_grad", "c_cfg", "eta1", "step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass
class MinMaxReport:
    kappa: float
    eps: float
    omega_estimate: float
    history: list = field(default_factory=list)
    extracted: RefineResult = None
    iterations: int = 0
    diagnostics: dict = field(default_factory=dict)
    sweepout: Sweepout = None
    profiles: list = field(default_factory=list)

    @property
    def converged(self):
        return self.extracted is not None and self.extracted.converged

    def to_json(self, csv_path=None):
        out = {"kappa": self.kappa, "eps": self.eps, "omega": self.omega_estimate,
               "iterations": self.iterations,
               "history": [list(h) for h in self.history],
               "diagnostics": self.diagnostics, "extracted": None}
        ex = self.extracted
        if ex is not None:
            mean, rel = speed_stats(ex.curve)
            out["extracted"] = {"csv_path": csv_path, "grad_norm": ex.grad_sup,
                                "speed_rel_std": rel, "speed_mean": mean,
                                "L_eps": perturbed_length(ex.curve, self.eps),
                                "action": ex.action, "morse_index": ex.morse_index}
        return out


def struwe_schedule(kappa, c_cfg, n):
    """kappa_n = kappa - 1/(4 c n), required to stay positive."""
    if n < 1 or c_cfg <= 0:
        raise ValueError("need n >= 1 and c_cfg > 0")
    kn = kappa - 1.0 / (4.0 * c_cfg * n)
    if kn <= 0.0:
        raise ScheduleUnderflow(f"kappa_n = {kn:.4g} is not positive")
    return kn


def band_cutoff(value, top, band):
    """1 on [top - band/2, top], linear down to 0 at top - band."""
    if band <= 0.0:
        return 0.0
    lo = top - band
    if value <= lo:
        return 0.0
    return min(1.0, (value - lo) / (0.5 * band))


def stable_step(u, eps):
    """Largest explicit step that does not amplify the stiffest (zigzag) modes.

    The edge flux has Lipschitz constant (1+eps)(eps^2+|e|^2)^((eps-1)/2)
    per edge, so the discrete second-difference operator is bounded by four
    times that over h^2.
    """
    M = len(u)
    h = 2.0 * math.pi / M
    e2 = np.sum(((np.roll(u, -1, axis=0) - u) / h) ** 2, axis=1)
    lip = 4.0 * (1.0 + eps) * np.max((eps * eps + e2) ** (0.5 * (eps - 1.0))) / (h * h)
    return 1.0 / lip


def _adjacent_ok(S, i, X, limit):
    for j in (i - 1, i + 1):
        if np.max(np.linalg.norm(S[j] - X, axis=1)) >= limit:
            return False
    return True


def tighten_band(s, params, band, step, passes, resample_every=25, ledger_every=100,
                 validate_every=1, on_pass=None):
    """Band-localized gradient flow on the near-maximal slices.

    Each slice with action above ``max - band`` takes a projected gradient
    step scaled by the cutoff, with Armijo backtracking on its own action and
    the adjacency bound enforced as a constraint.  End slices never move, so
    the maximum of the profile cannot increase.  Returns a new Sweepout.
    """
    out = s.copy()
    if band <= 0.0 or passes <= 0:
        return out
    surface = out.surface
    S = out.slices
    T = out.T
    h = 2.0 * math.pi / out.M
    limit = 0.5 * surface.tube_radius
    L = np.array([perturbed_length(x, params.eps) for x in S])
    prof = L + params.kappa * out.ledger_values
    last_alpha = np.full(T + 1, step)
    moved = set()
    for p in range(1, passes + 1):
        top = prof.max()
        for i in range(1, T):
            z = band_cutoff(prof[i], top, band)
            if z == 0.0:
                continue
            u = S[i]
            g = gradient(u, params, surface)
            gg = h * float(np.sum(g * g))
            if gg == 0.0:
                continue
            gmax = float(np.max(np.linalg.norm(g, axis=1)))
            alpha = z * min(step, 2.0 * last_alpha[i], stable_step(u, params.eps))
            if alpha * gmax >= surface.tube_radius:
                raise StepTooLarge(f"step moves slice {i} by {alpha * gmax:.3g}")
            for _ in range(40):
                X, _, status = kernels.project_points(u - alpha * g, surface.params)
                if status == kernels.STATUS_OK and _adjacent_ok(S, i, X, limit):
                    dA = area_increment(u, X, surface)
                    Ln = perturbed_length(X, params.eps)
                    pn = Ln + params.kappa * (out.ledger_values[i] + dA)
                    if pn <= prof[i] - ARMIJO * alpha * gg:
                        S[i] = X
                        L[i] = Ln
                        out.ledger_values[i] += dA
                        prof[i] = pn
                        last_alpha[i] = alpha / z
                        moved.add(i)
                        break
                alpha *= 0.5
        if resample_every and p % resample_every == 0:
            for i in sorted(moved):
                _try_resample(out, i, params, L, prof, limit)
            moved.clear()
        if ledger_every and p % ledger_every == 0:
            out.recompute_ledger()
            prof = L + params.kappa * out.ledger_values
        if validate_every and p % validate_every == 0:
            d, r = degree_with_residual(S, surface)
            if d != 1 or r > 0.05:
                raise DegreeLost(f"degree {d} (residual {r:.3g}) after pass {p}")
        if on_pass is not None:
            on_pass(p, out, prof)
    return out


def _try_resample(out, i, params, L, prof, limit):
    surface = out.surface
    u = out.slices[i]
    try:
        X = resample_arclength(u, out.M, surface).nodes
    except Exception:  # degenerate or unprojectable slices are left alone
        return
    if np.max(np.linalg.norm(X - u, axis=1)) >= limit or not _adjacent_ok(out.slices, i, X, limit):
        return
    dA = area_increment(u, X, surface)
    Ln = perturbed_length(X, params.eps)
    pn = Ln + params.kappa * (out.ledger_values[i] + dA)
    if pn <= prof[i]:
        out.slices[i] = X
        out.ledger_values[i] += dA
        L[i] = Ln
        prof[i] = pn


def _band_scale(params, profile):
    if params.kappa > 0.0:
        return params.kappa
    # geodesic case: no curvature scale, use a tenth of the current maximum
    return 0.1 * max(float(np.max(profile)), 1e-12)


def length_diagnostics(L_eps, kappa, cfg):
    cap = 8.0 * kappa ** 2 * cfg.c_cfg
    return {"L_eps": L_eps, "eta1": cfg.eta1, "length_cap": cap,
            "eta1_ok": bool(L_eps >= cfg.eta1), "length_cap_ok": bool(L_eps <= cap)}


def minmax_solve(surface, params, cfg=None, sweepout=None):
    """Tighten a sweepout with bands kappa/n and extract a critical max slice.

    Raises NoConvergence (with the partial report attached) when no slice
    can be refined to ``tol_grad`` within ``max_iterations`` rounds.
    """
    cfg = cfg or MinMaxConfig()
    if sweepout is None:
        sweepout = latitude_sweepout(surface, cfg.M, cfg.T)
        if cfg.struwe_n and params.kappa > 0:
            kn = struwe_schedule(params.kappa, cfg.c_cfg, cfg.struwe_n)
            sub = dict(vars(cfg), struwe_n=0)
            try:
                warm = minmax_solve(surface, ActionParams(kn, params.eps), MinMaxConfig(**sub))
                sweepout = warm.sweepout
            except NoConvergence as exc:
                sweepout = exc.report.sweepout
    s = sweepout
    prof = action_profile(s, params)
    i, top = max_slice(s, params, prof)
    report = MinMaxReport(params.kappa, params.eps, top, [(0, top, i, 0.0)], sweepout=s,
                          profiles=[prof])
    scale = _band_scale(params, prof)
    for n in range(1, cfg.max_iterations + 1):
        band = max(scale / n, 10.0 * cfg.tol_grad * cfg.step)
        s = tighten_band(s, params, band, cfg.step, cfg.passes_per_iteration,
                         cfg.resample_every, cfg.ledger_every, cfg.validate_every)
        prof = action_profile(s, params)
        i, top = max_slice(s, params, prof)
        report.omega_estimate = min(report.omega_estimate, top)
        report.history.append((n, top, i, band))
        report.iterations = n
        report.sweepout = s
        report.profiles.append(prof)
        log.info("minmax n=%d max=%.10g index=%d band=%.3g", n, top, i, band)
        try:
            res = refine(s.slices[i], surface, params, area=float(s.ledger_values[i]),
                         tol_grad=cfg.tol_grad, max_iter=cfg.newton_max_iter)
        except Exception as exc:  # a failed extraction just means more tightening
            log.info("extraction failed: %s", exc)
            continue
        rel = speed_stats(res.curve)[1]
        L_eps = perturbed_length(res.curve, params.eps)
        if res.converged and rel < SPEED_STD_TOL and L_eps >= cfg.eta1:
            report.extracted = res
            report.diagnostics = length_diagnostics(L_eps, params.kappa, cfg)
            report.diagnostics["small_length_ok"] = _small_length_check(s, params, cfg, prof)
            return report
    raise NoConvergence(f"no critical slice after {cfg.max_iterations} rounds", report)


def _small_length_check(s, params, cfg, prof):
    """Near-maximal slices (within kappa/n of the max) should have L_eps >= eta1."""
    top = prof.max()
    tol = params.kappa if params.kappa > 0 else 0.1 * top
    for x, v in zip(s.slices, prof):
        if v >= top - tol and perturbed_length(x, params.eps) < cfg.eta1:
            return False
    return True


def _scan_point(args):
    surface, eps, kappa, cfg = args
    try:
        rep = minmax_solve(surface, ActionParams(kappa, eps), cfg)
        return kappa, rep.omega_estimate, True
    except NoConvergence as exc:
        return kappa, exc.report.omega_estimate, False


def monotonicity_scan(surface, eps, kappa_grid, cfg=None, jobs=1, tol=1e-3):
    """omega and omega/kappa over an increasing kappa grid.

    Returns (rows, verdict) with rows (kappa, omega, omega/kappa, converged)
    and verdict PASS, FAIL, or SKIPPED-PARTIAL when some point did not converge.
    """
    grid = [float(k) for k in kappa_grid]
    if not grid or any(k <= 0 for k in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("kappa grid must be positive and strictly increasing")
    cfg = cfg or MinMaxConfig()
    tasks = [(surface, eps, k, cfg) for k in grid]
    if jobs > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_scan_point, tasks))
    else:
        results = [_scan_point(t) for t in tasks]
    rows = [(k, w, w / k, ok) for k, w, ok in results]
    if not all(r[3] for r in rows):
        return rows, "SKIPPED-PARTIAL"
    ratios = [r[2] for r in rows]
    for a, b in zip(ratios, ratios[1:]):
        if b > a * (1.0 + tol):
            return rows, "FAIL"
    return rows, "PASS"
