"""Timing comparison of the compiled potential kernel vs the numpy fallback.

Measures ``eval_potential`` throughput for batches of evaluation points
against charge configurations of realistic sizes (a Green's model carries a
few hundred to a few thousand charges), plus one end-to-end model solve.

Run from the repository root::

    python benchmarks/bench_kernels.py [--repeats 5] [--quick]
"""

import argparse
import time

import numpy as np

from convfactor.geometry import Disk
from convfactor.kernels import (
    IMPLEMENTATION,
    eval_potential_compiled,
    eval_potential_numpy,
)
from convfactor.potential import solve_green


def _inputs(n_points, n_charges, seed):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=n_points) + 1j * rng.normal(size=n_points)
    pts *= 10.0
    ang = rng.uniform(0.0, 2.0 * np.pi, size=n_charges)
    charges = 0.9 * np.exp(1j * ang)
    weights = rng.uniform(0.5, 1.5, size=n_charges)
    weights /= weights.sum()
    return pts, charges, weights


def _best_of(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5,
                    help="keep the best of this many timings (default 5)")
    ap.add_argument("--quick", action="store_true",
                    help="small sizes only, for smoke-testing the harness")
    args = ap.parse_args()

    if IMPLEMENTATION != "compiled":
        print("note: compiled kernel not installed; both columns run the "
              "numpy fallback")
    compiled = (eval_potential_compiled if IMPLEMENTATION == "compiled"
                else eval_potential_numpy)

    sizes = [(10_000, 128), (100_000, 256), (1_000_000, 512)]
    if args.quick:
        sizes = [(10_000, 128)]

    print(f"eval_potential: best of {args.repeats} runs "
          f"(active implementation: {IMPLEMENTATION})")
    header = (f"{'points':>10} {'charges':>8} {'numpy (ms)':>12} "
              f"{'compiled (ms)':>14} {'speedup':>8} {'max |diff|':>11}")
    print(header)
    print("-" * len(header))
    for n_points, n_charges in sizes:
        pts, charges, weights, = _inputs(n_points, n_charges, seed=n_points)
        robin = -1.25
        t_np = _best_of(
            lambda: eval_potential_numpy(pts, charges, weights, robin),
            args.repeats)
        t_c = _best_of(
            lambda: compiled(pts, charges, weights, robin), args.repeats)
        diff = float(np.max(np.abs(
            compiled(pts, charges, weights, robin)
            - eval_potential_numpy(pts, charges, weights, robin))))
        print(f"{n_points:>10,} {n_charges:>8} {1e3 * t_np:>12.2f} "
              f"{1e3 * t_c:>14.2f} {t_np / t_c:>7.1f}x {diff:>11.2e}")

    shapes = [Disk(0.0, 1.0), Disk(18.0, 1.0)]
    t0 = time.perf_counter()
    model = solve_green(shapes)
    t_solve = time.perf_counter() - t0
    print(f"\nsolve_green on two unit disks: {1e3 * t_solve:.1f} ms "
          f"({len(model.charges)} charges, residual "
          f"{model.residual_norm:.2e})")


if __name__ == "__main__":
    main()
