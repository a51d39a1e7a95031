"""epsilon -> 0 continuation, unit-speed reparametrization and CGC residuals."""
from dataclasses import dataclass, field
import logging
import math

import numpy as np

from .action import ActionParams, reduce_area
from .critical import refine
from .curve import (DiscreteCurve, derivative, length, nodes_of, resample_arclength,
                    second_derivative, speed_stats)
from .errors import ContinuationBroke, NoConvergence, NotConstantSpeed, NotUnitSpeed
from .minmax import MinMaxConfig, minmax_solve

log = logging.getLogger(__name__)

DEFAULT_EPS = (0.3, 0.1, 0.03, 0.01, 0.003, 0.001)
SPEED_PRE_TOL = 1e-3


def default_eps_sequence(start=0.3, stop=1e-3, ratio=0.3):
    """Geometric schedule start, start*ratio, ... ending exactly at ``stop``."""
    out = [start]
    while out[-1] * ratio > stop * (1.0 + 1e-9):
        out.append(out[-1] * ratio)
    if out[-1] > stop:
        out.append(stop)
    return out


def speed_bounds(eps, eta1, kappa, c_cfg):
    """Admissible interval for the constant speed of a critical curve (C = 2 c_cfg)."""
    C = 2.0 * c_cfg
    p = 2.0 / (1.0 + eps)
    base = eps ** (1.0 + eps)
    lo2 = (eta1 / (2.0 * math.pi) + base) ** p - eps * eps
    hi2 = (4.0 * kappa ** 2 * C / math.pi + base) ** p - eps * eps
    return math.sqrt(max(lo2, 0.0)), math.sqrt(max(hi2, 0.0))


def _chord_rel_std(X):
    ch = np.linalg.norm(np.roll(X, -1, axis=0) - X, axis=1)
    m = ch.mean()
    return math.inf if m == 0.0 else float(ch.std() / m)


def cgc_residual(u, kappa, surface):
    """Residual u'' - A(u', u') - kappa Q(u') of a unit-speed curve.

    Derivatives are periodic differences in arclength with spacing length/M.
    Returns (sup norm, per-node residual vectors).
    """
    X = nodes_of(u)
    if _chord_rel_std(X) >= SPEED_PRE_TOL:
        raise NotUnitSpeed("curve is not parametrized proportionally to arclength")
    M = len(X)
    ds = length(X) / M
    d1 = (np.roll(X, -1, axis=0) - np.roll(X, 1, axis=0)) / (2.0 * ds)
    d2 = (np.roll(X, -1, axis=0) - 2.0 * X + np.roll(X, 1, axis=0)) / (ds * ds)
    t = surface.tangent_projector(X, d1)
    r = (d2 - surface.second_fundamental_form(X, t, t, check=False)
         - kappa * surface.rotate90(X, t, check=False))
    return float(np.max(np.linalg.norm(r, axis=1))), r


def euler_lagrange_residual(u, params, surface):
    """Sup norm of -(1+e)u'' + (1+e)A(u',u') + kappa (e^2+l^2)^((1-e)/2) Q(u').

    ``u`` is in its own (constant-speed) parametrization on the 2*pi grid and
    ``l`` is its measured mean edge speed.
    """
    X = nodes_of(u)
    if _chord_rel_std(X) >= SPEED_PRE_TOL:
        raise NotConstantSpeed("curve does not have constant speed")
    eps, kappa = params.eps, params.kappa
    l = speed_stats(X)[0]
    d1 = surface.tangent_projector(X, derivative(X))
    d2 = second_derivative(X)
    r = (-(1.0 + eps) * d2 + (1.0 + eps) * surface.second_fundamental_form(X, d1, d1, check=False)
         + kappa * (eps * eps + l * l) ** (0.5 * (1.0 - eps)) * surface.rotate90(X, d1, check=False))
    return float(np.max(np.linalg.norm(r, axis=1)))


def scaled_el_residual(u, params, surface):
    """EL residual rescaled to unit speed: divide by (1 + eps) l^2."""
    l = speed_stats(u)[0]
    return euler_lagrange_residual(u, params, surface) / ((1.0 + params.eps) * l * l)


def reparametrization_check(u_before, u_after, params, surface):
    """|cgc residual after reparametrization - rescaled EL residual before|."""
    a = cgc_residual(u_after, params.kappa, surface)[0]
    b = scaled_el_residual(u_before, params, surface)
    return abs(a - b)


def richardson(eps_values, values):
    """Value at eps = 0 of the quadratic through the last three points."""
    if len(values) < 3:
        return float(values[-1]) if values else math.nan
    x = np.asarray(eps_values[-3:], dtype=float)
    y = np.asarray(values[-3:], dtype=float)
    coef = np.polyfit(x, y, 2)
    return float(coef[-1])


@dataclass
class CriticalPointReport:
    curve: DiscreteCurve
    kappa: float
    eps_final: float
    speed_mean: float
    speed_rel_std: float
    cgc_residual_sup: float
    length: float
    enclosed_area_mod: float
    omega_estimate: float
    critical_curve: np.ndarray = None
    sweepout_omega: float = math.nan
    grad_sup: float = math.nan
    morse_index: int = -1
    stages: list = field(default_factory=list)
    extrapolated: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    failed_index: int = -1
    profiles: list = field(default_factory=list)
    stage_curves: list = field(default_factory=list)

    def to_json(self, csv_path=None):
        return {
            "kappa": self.kappa, "eps_final": self.eps_final,
            "speed_mean": self.speed_mean, "speed_rel_std": self.speed_rel_std,
            "cgc_residual_sup": self.cgc_residual_sup, "length": self.length,
            "enclosed_area_mod": self.enclosed_area_mod,
            "omega_estimate": self.omega_estimate, "sweepout_omega": self.sweepout_omega,
            "grad_norm": self.grad_sup, "morse_index": self.morse_index,
            "converged": self.failed_index < 0, "failed_index": self.failed_index,
            "stages": self.stages, "extrapolated": self.extrapolated,
            "diagnostics": self.diagnostics, "curve_csv": csv_path,
        }


def _stage_record(eps, res, move):
    mean, rel = speed_stats(res.curve)
    return {"eps": eps, "grad_norm": res.grad_sup, "action": res.action,
            "length": length(res.curve), "speed_mean": mean, "speed_rel_std": rel,
            "newton_iterations": res.iterations, "morse_index": res.morse_index,
            "move": move}


def _build_report(surface, kappa, eps, res, stages, mm, cfg, curves, failed=-1):
    params = ActionParams(kappa, eps)
    mean, rel = speed_stats(res.curve)
    unit = resample_arclength(res.curve, len(res.curve), surface)
    cgc = cgc_residual(unit, kappa, surface)[0]
    lo, hi = speed_bounds(eps, cfg.eta1, kappa, cfg.c_cfg)
    L = length(unit)
    diag = {
        "speed_bounds": [lo, hi], "speed_bounds_ok": bool(lo <= mean <= hi),
        "el_residual": euler_lagrange_residual(res.curve, params, surface),
        "reparametrization_gap": reparametrization_check(res.curve, unit, params, surface),
        "nontrivial_ok": bool(L >= 0.5 * cfg.eta1),
        "max_stage_move": max([s["move"] for s in stages[1:]], default=0.0),
        "minmax": dict(mm.diagnostics, iterations=mm.iterations),
    }
    eps_list = [s["eps"] for s in stages]
    extra = {}
    if len(stages) >= 3:
        extra["length"] = richardson(eps_list, [s["length"] for s in stages])
        extra["cgc_residual"] = richardson(eps_list, [s.get("cgc_residual", math.nan) for s in stages])
        extra["omega"] = richardson(eps_list, [s["action"] for s in stages])
    return CriticalPointReport(
        curve=unit, kappa=kappa, eps_final=eps, speed_mean=mean, speed_rel_std=rel,
        cgc_residual_sup=cgc, length=L,
        enclosed_area_mod=reduce_area(res.area, surface.total_area),
        omega_estimate=res.action, critical_curve=res.curve, stage_curves=list(curves),
        sweepout_omega=mm.omega_estimate, grad_sup=res.grad_sup,
        morse_index=res.morse_index, stages=stages, extrapolated=extra,
        diagnostics=diag, failed_index=failed, profiles=list(mm.profiles))


def continue_in_eps(surface, kappa, eps_sequence=DEFAULT_EPS, cfg=None):
    """Solve at eps_sequence[0] by min-max, then follow the critical curve.

    Each later stage warm-starts Newton refinement from the previous curve
    and its ledger area.  Raises ContinuationBroke(j) carrying the report
    of the last good stage when stage j fails.
    """
    eps_sequence = [float(e) for e in eps_sequence]
    if not eps_sequence or any(not (0.0 < e <= 0.5) for e in eps_sequence):
        raise ValueError("eps values must lie in (0, 0.5]")
    if any(b >= a for a, b in zip(eps_sequence, eps_sequence[1:])):
        raise ValueError("eps schedule must be strictly decreasing")
    if eps_sequence[-1] < 1e-4:
        raise ValueError("last eps must be >= 1e-4")
    cfg = cfg or MinMaxConfig()
    try:
        mm = minmax_solve(surface, ActionParams(kappa, eps_sequence[0]), cfg)
    except NoConvergence as exc:
        broke = ContinuationBroke(f"min-max failed at eps={eps_sequence[0]}", 0, None)
        broke.minmax = exc.report
        raise broke from exc
    res = mm.extracted
    stages = [_stage_record(eps_sequence[0], res, 0.0)]
    stages[0]["cgc_residual"] = _unit_cgc(res.curve, kappa, surface)
    curves = [res.curve]
    for j, eps in enumerate(eps_sequence[1:], start=1):
        params = ActionParams(kappa, eps)
        try:
            new = refine(res.curve, surface, params, area=res.area, tol_grad=cfg.tol_grad,
                         max_iter=cfg.newton_max_iter)
        except Exception as exc:  # geometric failures are reported like non-convergence
            log.info("refinement raised at eps=%g: %s", eps, exc)
            new = None
        if new is None or not new.converged:
            last = _build_report(surface, kappa, eps_sequence[j - 1], res, stages, mm, cfg, curves,
                                 failed=j)
            raise ContinuationBroke(f"refinement failed at eps={eps}", j, last)
        move = float(np.max(np.linalg.norm(new.curve - res.curve, axis=1)))
        res = new
        curves.append(res.curve)
        rec = _stage_record(eps, res, move)
        rec["cgc_residual"] = _unit_cgc(res.curve, kappa, surface)
        stages.append(rec)
        log.info("eps=%g |g|=%.2e length=%.10g move=%.3g", eps, res.grad_sup, rec["length"], move)
    return _build_report(surface, kappa, eps_sequence[-1], res, stages, mm, cfg, curves)


def _unit_cgc(X, kappa, surface):
    try:
        return cgc_residual(resample_arclength(X, len(X), surface), kappa, surface)[0]
    except Exception:
        return math.nan
