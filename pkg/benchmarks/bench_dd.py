"""Timing comparison of the double description adjacency kernels.

Runs dd_rays on the real facet matrices (the 0/1 blocker indicators) with
the compiled kernel and with the pure-Python fallback, at one or more
worker counts, and prints a small table.

    python3 benchmarks/bench_dd.py                 # rank 5, both kernels
    python3 benchmarks/bench_dd.py --rank 6        # the heavy case
    python3 benchmarks/bench_dd.py --workers 1 4   # thread scaling

Rank 6 is the interesting size (132 facets in dimension 32, 796 rays,
intermediate frontier above 1300 rays).  The pure kernel is usable there
but slow; pass --skip-pure to time only the compiled one.
"""

from __future__ import annotations

import argparse
import time

from flagcone import _ddpure, _kernel, polyhedra
from flagcone.cone import facet_system


def run_once(rows, kernel, workers: int) -> tuple[int, float]:
    original = polyhedra.adjacency_pairs
    polyhedra.adjacency_pairs = kernel
    try:
        t0 = time.perf_counter()
        rays = polyhedra.dd_rays(rows, workers=workers)
        elapsed = time.perf_counter() - t0
    finally:
        polyhedra.adjacency_pairs = original
    return len(rays), elapsed


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rank", type=int, default=5, choices=range(2, 7))
    parser.add_argument("--workers", type=int, nargs="+", default=[1, 4])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--skip-pure", action="store_true")
    args = parser.parse_args()

    n = args.rank - 1
    rows = facet_system(n).normal_matrix
    print(f"rank {args.rank}: {len(rows)} facet rows, dimension {2 ** n}")

    kernels: list[tuple[str, object]] = []
    if _kernel.HAVE_COMPILED:
        kernels.append(("compiled", _kernel.adjacency_pairs))
    else:
        print("compiled kernel not built; timing the pure kernel only")
    if not args.skip_pure:
        kernels.append(("pure", _ddpure.adjacency_pairs))

    results = {}
    for name, kernel in kernels:
        for workers in args.workers:
            if name == "pure" and workers != args.workers[0]:
                continue  # the pure kernel ignores the worker count
            times = []
            nrays = 0
            for _ in range(args.repeat):
                nrays, dt = run_once(rows, kernel, workers)
                times.append(dt)
            label = name if name == "pure" else f"{name} w={workers}"
            results[label] = (nrays, min(times))
            print(f"  {label:<14} {nrays} rays   best of {args.repeat}: "
                  f"{min(times):.3f} s")

    counts = {nrays for nrays, _ in results.values()}
    if len(counts) != 1:
        print("DISAGREEMENT in ray counts:", results)
        return 1
    if len(results) > 1:
        slowest = max(t for _, t in results.values())
        fastest = min(t for _, t in results.values())
        if fastest > 0:
            print(f"  spread: {slowest / fastest:.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
