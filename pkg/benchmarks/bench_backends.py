#!/usr/bin/env python3
"""Time the compiled stepping kernel against the pure-numpy fallback.

The dominant cost is the memory sum on the right-hand side: every step
re-weights the full history of second differences, so one advance is
O(n^2 * m).  The compiled kernel keeps the history differences
incrementally with no per-step Python cost; the numpy path rebuilds them
through two BLAS mat-vecs per step.

    python benchmarks/bench_backends.py --m1 100 --m2 500 --n 400 --repeats 3
"""

import argparse
import time

import numpy as np

from fracstefan import MeshConfig, PhysicalParams, backend, make_phase_grid, advance_phase


def time_advance(name, phase, p, mesh, params, repeats):
    with backend.use(name):
        # untimed warm-up run: triggers compilation on the numba path
        advance_phase(make_phase_grid(phase, p, mesh, params))
        best = float("inf")
        for _ in range(repeats):
            grid = make_phase_grid(phase, p, mesh, params)
            start = time.perf_counter()
            advance_phase(grid)
            best = min(best, time.perf_counter() - start)
    return best, grid.ubar


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--alpha", type=float, default=0.5)
    parser.add_argument("--p", type=float, default=0.75)
    parser.add_argument("--m1", type=int, default=100)
    parser.add_argument("--m2", type=int, default=500)
    parser.add_argument("--n", type=int, default=400)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    mesh = MeshConfig(m1=args.m1, m2=args.m2, n=args.n)
    params = PhysicalParams(alpha=args.alpha)
    names = backend.available()
    print(f"backends: {', '.join(names)}   (active default: {backend.active()})")
    print(f"mesh: m1={mesh.m1} m2={mesh.m2} n={mesh.n}, alpha={args.alpha}, "
          f"p={args.p}, best of {args.repeats}")

    for phase in (1, 2):
        timings = {}
        fields = {}
        for name in names:
            timings[name], fields[name] = time_advance(
                name, phase, args.p, mesh, params, args.repeats)
        line = "  ".join(f"{name}: {timings[name] * 1e3:8.2f} ms" for name in names)
        print(f"phase {phase}:  {line}")
        if len(names) == 2:
            ratio = timings["numpy"] / timings["numba"]
            scale = np.abs(fields["numpy"]).max()
            gap = np.abs(fields["numba"] - fields["numpy"]).max()
            print(f"          speedup numba over numpy: {ratio:5.1f}x   "
                  f"max field deviation: {gap / scale:.2e} (relative)")


if __name__ == "__main__":
    main()
