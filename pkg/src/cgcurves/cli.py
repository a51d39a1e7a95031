"""Command-line interface: ``cgcurves {solve,scan,verify,sweepout}``.

Configuration comes from an optional JSON file (``--config``); command-line
flags override file fields.  Exit codes: 0 success, 1 configuration error,
2 no convergence, 3 verification failure.
"""
import argparse
from dataclasses import dataclass, field, fields
import json
import logging
import math
import os
import sys

from . import __version__
from .action import ActionParams
from .errors import CGCError, ConfigError, ContinuationBroke
from .surface import SurfaceModel

log = logging.getLogger("cgcurves")

EXIT_OK, EXIT_CONFIG, EXIT_NOCONV, EXIT_VERIFY = 0, 1, 2, 3


@dataclass
class RunConfig:
    surface: dict = field(default_factory=lambda: {"kind": "sphere", "radius": 1.0})
    kappa: float = None
    kappas: list = None
    eps: list = field(default_factory=lambda: [0.3, 0.1, 0.03, 0.01, 0.003, 0.001])
    nodes: int = 256
    slices: int = 64
    tol_grad: float = 1e-8
    c_cfg: float = 1.0
    eta1: float = 0.1
    max_iterations: int = 20
    passes: int = 10
    step: float = 0.05
    out: str = "cgcurves_out"
    seed: int = 0
    samples: int = 100_000
    jobs: int = 1

    def validate(self, need_kappa=False, need_grid=False):
        try:
            self.surface_model = SurfaceModel.from_config(self.surface)
        except ConfigError:
            raise
        for name in ("nodes", "slices", "max_iterations", "passes", "samples", "jobs"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ConfigError(f"{name}: must be a positive integer, got {v!r}")
        if self.nodes < 8 or self.nodes % 2:
            raise ConfigError(f"nodes: must be even and >= 8, got {self.nodes}")
        if self.slices < 2:
            raise ConfigError(f"slices: must be >= 2, got {self.slices}")
        for name in ("tol_grad", "c_cfg", "eta1", "step"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not v > 0:
                raise ConfigError(f"{name}: must be positive, got {v!r}")
        if not self.eps or any(not (0.0 < e <= 0.5) for e in self.eps):
            raise ConfigError("eps: values must lie in (0, 0.5]")
        if any(b >= a for a, b in zip(self.eps, self.eps[1:])):
            raise ConfigError("eps: schedule must be strictly decreasing")
        if self.eps[-1] < 1e-4:
            raise ConfigError("eps: last value must be >= 1e-4")
        if need_kappa:
            if self.kappa is None:
                raise ConfigError("kappa: missing (use --kappa or the config field 'kappa')")
            if not self.kappa >= 0:
                raise ConfigError(f"kappa: must be >= 0, got {self.kappa}")
        if need_grid:
            grid = self.kappas or ([self.kappa] if self.kappa is not None else None)
            if not grid:
                raise ConfigError("kappas: missing (use --kappas or the config field 'kappas')")
            if any(k <= 0 for k in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
                raise ConfigError("kappas: must be positive and strictly increasing")
            self.kappas = list(grid)
        return self

    def minmax_config(self):
        from .minmax import MinMaxConfig
        return MinMaxConfig(M=self.nodes, T=self.slices, tol_grad=self.tol_grad,
                            c_cfg=self.c_cfg, eta1=self.eta1,
                            max_iterations=self.max_iterations,
                            passes_per_iteration=self.passes, step=self.step)

    def to_json(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: {path} line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be a JSON object")
    known = {f.name for f in fields(RunConfig)}
    for key in data:
        if key not in known:
            raise ConfigError(f"{key}: unknown config field")
    return data


def build_config(args):
    """Defaults, then the JSON file, then command-line flags."""
    data = _load_config(getattr(args, "config", None))
    cfg = RunConfig(**data)
    surf = dict(cfg.surface) if isinstance(cfg.surface, dict) else cfg.surface
    if getattr(args, "surface", None):
        surf = {"kind": args.surface}
        if args.surface == "sphere":
            surf["radius"] = args.radius if args.radius is not None else 1.0
    if getattr(args, "radius", None) is not None and isinstance(surf, dict):
        surf["radius"] = args.radius
    if getattr(args, "axes", None) is not None and isinstance(surf, dict):
        surf["axes"] = args.axes
    if isinstance(surf, dict) and surf.get("kind") == "ellipsoid" and "axes" not in surf:
        raise ConfigError("axes: ellipsoid needs --axes a,b,c")
    cfg.surface = surf
    for name in ("kappa", "kappas", "eps", "nodes", "slices", "tol_grad", "c_cfg", "eta1",
                 "max_iterations", "passes", "step", "out", "seed", "samples", "jobs"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, name, v)
    return cfg


def _dump_json(obj, path):
    with open(path, "w") as fh:
        json.dump(_clean(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _clean(obj):
    """Make floats JSON-safe (NaN/inf become null) and numpy scalars plain."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (list, dict)):
        try:
            obj = obj.item()
        except (ValueError, AttributeError):
            pass
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


# ---------------------------------------------------------------------------

def cmd_solve(cfg):
    from .continuation import continue_in_eps
    from .curve import write_csv
    from .svgplot import solve_figure
    cfg.validate(need_kappa=True)
    surface = cfg.surface_model
    os.makedirs(cfg.out, exist_ok=True)
    csv_path = os.path.join(cfg.out, "curve.csv")
    report_path = os.path.join(cfg.out, "report.json")
    try:
        rep = continue_in_eps(surface, float(cfg.kappa), cfg.eps, cfg.minmax_config())
        status = EXIT_OK
    except ContinuationBroke as exc:
        log.error("%s", exc)
        rep = exc.report
        status = EXIT_NOCONV
        if rep is None:
            mm = getattr(exc, "minmax", None)
            out = {"converged": False, "failed_index": exc.index, "error": str(exc),
                   "config": cfg.to_json(),
                   "minmax": mm.to_json() if mm is not None else None}
            _dump_json(out, report_path)
            if mm is not None:
                from .svgplot import profile_figure
                profile_figure(os.path.join(cfg.out, "profile.svg"), mm.profiles)
            print(json.dumps({"converged": False, "report": report_path}))
            return status
    write_csv(rep.curve, csv_path)
    out = rep.to_json(csv_path="curve.csv")
    out["surface"] = surface.to_config()
    out["config"] = cfg.to_json()
    _dump_json(out, report_path)
    solve_figure(os.path.join(cfg.out, "solution.svg"), surface, rep.curve.nodes, rep.profiles)
    print(json.dumps({"converged": status == EXIT_OK, "length": rep.length,
                      "omega": rep.omega_estimate, "cgc_residual": rep.cgc_residual_sup,
                      "report": report_path}))
    return status


def cmd_scan(cfg):
    from .minmax import monotonicity_scan
    cfg.validate(need_grid=True)
    os.makedirs(cfg.out, exist_ok=True)
    rows, verdict = monotonicity_scan(cfg.surface_model, cfg.eps[-1], cfg.kappas,
                                      cfg.minmax_config(), jobs=cfg.jobs)
    path = os.path.join(cfg.out, "scan.csv")
    with open(path, "w") as fh:
        fh.write("kappa,omega,omega_over_kappa,converged\n")
        for k, w, r, ok in rows:
            fh.write(f"{k:.17g},{w:.17g},{r:.17g},{int(ok)}\n")
    _dump_json({"verdict": verdict, "eps": cfg.eps[-1], "rows": [list(r) for r in rows],
                "table": "scan.csv"}, os.path.join(cfg.out, "scan.json"))
    print(f"monotonicity: {verdict}")
    return EXIT_OK if all(r[3] for r in rows) else EXIT_NOCONV


def cmd_verify(cfg, c_scale=1.0):
    from .verify import FuzzConfig, run_all
    cfg.validate()
    fc = FuzzConfig(sample_count=cfg.samples, seed=cfg.seed)
    summary = run_all(fc, cfg.surface_model, c_scale=c_scale)
    os.makedirs(cfg.out, exist_ok=True)
    _dump_json(summary, os.path.join(cfg.out, "verify.json"))
    print(json.dumps({"passed": summary["passed"], "violations": summary["violations"]}))
    return EXIT_OK if summary["passed"] else EXIT_VERIFY


def cmd_sweepout(cfg):
    from .svgplot import profile_figure
    from .sweepout import action_profile, latitude_sweepout, validate
    cfg.validate()
    os.makedirs(cfg.out, exist_ok=True)
    s = latitude_sweepout(cfg.surface_model, cfg.nodes, cfg.slices)
    d, r = validate(s)
    s.dump(os.path.join(cfg.out, "sweepout.json"))
    kappa = float(cfg.kappa) if cfg.kappa is not None else 0.0
    prof = action_profile(s, ActionParams(kappa, cfg.eps[0]))
    profile_figure(os.path.join(cfg.out, "profile.svg"), [prof],
                   f"kappa={kappa:g} eps={cfg.eps[0]:g}")
    print(json.dumps({"degree": d, "residual": r, "max_action": float(prof.max())}))
    return EXIT_OK


# ---------------------------------------------------------------------------

def _common(p):
    p.add_argument("--config", help="JSON config file; flags override its fields")
    p.add_argument("--surface", choices=["sphere", "ellipsoid"], help="surface kind (default sphere)")
    p.add_argument("--radius", type=float, help="sphere radius (default 1)")
    p.add_argument("--axes", type=_floats, help="ellipsoid semi-axes a,b,c")
    p.add_argument("--eps", type=_floats, help="decreasing eps schedule (default 0.3,...,0.001)")
    p.add_argument("--nodes", "-M", type=int, help="nodes per curve (default 256)")
    p.add_argument("--slices", "-T", type=int, help="sweepout slices (default 64)")
    p.add_argument("--tol-grad", dest="tol_grad", type=float, help="gradient tolerance (default 1e-8)")
    p.add_argument("--c-cfg", dest="c_cfg", type=float, help="derivative bound c (default 1)")
    p.add_argument("--eta1", type=float, help="small-length threshold (default 0.1)")
    p.add_argument("--max-iterations", dest="max_iterations", type=int,
                   help="min-max rounds (default 20)")
    p.add_argument("--passes", type=int, help="tightening passes per round (default 10)")
    p.add_argument("--step", type=float, help="flow step (default 0.05)")
    p.add_argument("--out", help="output directory (default cgcurves_out)")
    p.add_argument("--seed", type=int, help="random seed (default 0)")
    p.add_argument("-v", "--verbose", action="count", default=0)


def make_parser():
    parser = argparse.ArgumentParser(prog="cgcurves",
                                     description="Closed curves of constant geodesic curvature by min-max.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="min-max solve plus eps continuation")
    _common(p)
    p.add_argument("--kappa", type=float, help="prescribed geodesic curvature (required)")

    p = sub.add_parser("scan", help="omega/kappa monotonicity scan")
    _common(p)
    p.add_argument("--kappa", type=float, help=argparse.SUPPRESS)
    p.add_argument("--kappas", type=_floats, help="increasing kappa grid, e.g. 0.5,1,2")
    p.add_argument("--jobs", type=int, help="worker processes (default 1)")

    p = sub.add_parser("verify", help="run the oracle and inequality suites")
    _common(p)
    p.add_argument("--samples", type=int, help="fuzz samples per suite (default 100000)")
    p.add_argument("--corrupt-c-eps", dest="corrupt_c_eps", type=float, default=1.0,
                   help=argparse.SUPPRESS)

    p = sub.add_parser("sweepout", help="dump the initial latitude sweepout and its profile")
    _common(p)
    p.add_argument("--kappa", type=float, help="curvature for the profile (default 0)")
    return parser


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = build_config(args)
        if args.command == "solve":
            return cmd_solve(cfg)
        if args.command == "scan":
            return cmd_scan(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, c_scale=args.corrupt_c_eps)
        return cmd_sweepout(cfg)
    except (ConfigError, TypeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CGCError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOCONV


if __name__ == "__main__":
    sys.exit(main())
