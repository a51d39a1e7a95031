"""Benchmark the numba kernels against their pure-numpy twins.

Times the hot kernels (projection, action gradient, homotopy area) on the
same inputs for both backends and checks that they agree.  With ``--solve``
it also times a full ``cgcurves solve`` run under each backend in a fresh
interpreter (the backend is chosen at import time by CGCURVES_NUMBA).

Run:

    python3 benchmarks/bench_kernels.py --nodes 256 --repeats 5
"""
import argparse
import os
import statistics
import subprocess
import sys
import tempfile
import time

import numpy as np

from cgcurves import _kernels_numba as kn
from cgcurves import _kernels_numpy as kp
from cgcurves import kernels
from cgcurves.surface import SurfaceModel
from cgcurves.verify import random_curve


def time_call(fn, repeats):
    fn()  # warm-up (and JIT compilation for numba)
    durations = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        durations.append(time.perf_counter() - t0)
    return statistics.mean(durations), statistics.pstdev(durations)


def kernel_cases(surface, M, seed):
    rng = np.random.default_rng(seed)
    u = random_curve(surface, M, rng)
    v = surface.project(u + 0.02 * rng.normal(size=u.shape))
    Y = u * rng.uniform(0.8, 1.2, size=(M, 1))
    sp = surface.params
    sx, sw = kernels.EDGE_NODES, kernels.EDGE_WEIGHTS
    tx, tw = kernels.TIME_NODES, kernels.TIME_WEIGHTS
    K = 4
    cases = {}
    for name, mod in (("numba", kn), ("numpy", kp)):
        cases[name] = {
            "project": lambda mod=mod: mod.project_points(Y, *sp),
            "gradient": lambda mod=mod: mod.gradient(u, 0.01, 1.0, *sp, sx, sw),
            "area": lambda mod=mod: mod.area_increment(u, v, K, tx, tw, sx, sw, *sp),
        }
    return cases


def bench_kernels(args):
    surfaces = {"sphere": SurfaceModel.sphere(1.0), "ellipsoid": SurfaceModel.ellipsoid(1.0, 1.0, 1.3)}
    print(f"{'surface':<10} {'kernel':<9} {'numba ms':>12} {'numpy ms':>12} {'speedup':>8} {'max diff':>10}")
    for sname, surface in surfaces.items():
        cases = kernel_cases(surface, args.nodes, args.seed)
        for kname in ("project", "gradient", "area"):
            a = cases["numba"][kname]
            b = cases["numpy"][kname]
            ra, rb = a()[0], b()[0]
            diff = float(np.max(np.abs(np.asarray(ra) - np.asarray(rb))))
            ta, sa = time_call(a, args.repeats)
            tb, sb = time_call(b, args.repeats)
            print(f"{sname:<10} {kname:<9} {1e3 * ta:8.3f}±{1e3 * sa:<4.2f}"
                  f"{1e3 * tb:8.3f}±{1e3 * sb:<4.2f}{tb / ta:8.1f}x {diff:10.1e}")


def bench_solve(args):
    print(f"\nfull solve, kappa=1, M={args.nodes}, T={args.slices}")
    for flag, name in (("1", "numba"), ("0", "numpy")):
        env = dict(os.environ, CGCURVES_NUMBA=flag)
        with tempfile.TemporaryDirectory() as out:
            cmd = [sys.executable, "-m", "cgcurves", "solve", "--kappa", "1",
                   "--nodes", str(args.nodes), "--slices", str(args.slices), "--out", out]
            subprocess.run(cmd, env=env, check=True, capture_output=True)  # warm the JIT cache
            t0 = time.perf_counter()
            subprocess.run(cmd, env=env, check=True, capture_output=True)
            print(f"  {name:<6} {time.perf_counter() - t0:7.2f} s")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--nodes", type=int, default=256, help="nodes per curve (default 256)")
    p.add_argument("--slices", type=int, default=64, help="sweepout slices for --solve (default 64)")
    p.add_argument("--repeats", type=int, default=5, help="timed repeats per kernel (default 5)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--solve", action="store_true", help="also time a full solve per backend")
    args = p.parse_args(argv)
    bench_kernels(args)
    if args.solve:
        bench_solve(args)


if __name__ == "__main__":
    main()
