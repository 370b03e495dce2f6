"""Benchmark the compiled kernel backend against the pure-numpy fallback.

Runs the three hot kernels (pairwise scatter-add convolution, first-term
resonance accumulation, exhaustive phase statistics) on frequency cubes of
increasing side and reports per-backend timings plus the speedup factor.

Usage:
    python3 benchmarks/bench_kernels.py [--sides 8,16,24] [--dim 2] [--repeat 3]

The numba backend is compiled once per kernel before timing; if numba is not
importable only the numpy column is reported.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from nls_inflation_lab import kernels
from nls_inflation_lab.spectra import cube_indicator


def row_major_strides(shape: np.ndarray) -> np.ndarray:
    strides = np.ones(len(shape), np.int64)
    for q in range(len(shape) - 2, -1, -1):
        strides[q] = strides[q + 1] * int(shape[q + 1])
    return strides


def box_inputs(dim: int, side: int):
    """Encoded inputs exactly as the sparse convolution layer prepares them."""
    cube = cube_indicator((0,) * dim, side)
    lo, hi = cube.bounding_box()
    # pairwise convolution over the Minkowski-sum box
    shape2 = (hi - lo) * 2 + 1
    strides2 = row_major_strides(shape2)
    idx = (cube.coords - lo) @ strides2
    acc2 = np.zeros(int(np.prod(shape2)), np.complex128)
    # first-term accumulation over the difference box xi1 - xi2 + xi3
    shape3 = (hi - lo) * 3 + 1
    strides3 = row_major_strides(shape3)
    idx1 = (cube.coords - lo) @ strides3
    idx2n = (hi - cube.coords) @ strides3
    acc3 = np.zeros(int(np.prod(shape3)), np.complex128)
    rng = np.random.default_rng(7)
    vals = rng.standard_normal(len(cube)) + 1j * rng.standard_normal(len(cube))
    return cube.coords, vals, idx, acc2, idx1, idx2n, acc3


def best_of(repeat: int, fn) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sides", default="8,16,24",
                        help="comma-separated cube sides")
    parser.add_argument("--dim", type=int, default=2, choices=(1, 2, 3))
    parser.add_argument("--repeat", type=int, default=3,
                        help="take the best of this many runs")
    args = parser.parse_args()
    sides = [int(s) for s in args.sides.split(",") if s.strip()]

    backends = [("numpy", kernels.accumulate_products_numpy,
                 kernels.xi1_accumulate_numpy, kernels.xi1_phase_stats_numpy)]
    if kernels.HAVE_NUMBA:
        backends.append(("numba", kernels.accumulate_products_numba,
                         kernels.xi1_accumulate_numba,
                         kernels.xi1_phase_stats_numba))
    else:
        print("numba not importable; timing the numpy backend only")

    t = 1e-4
    header = f"{'kernel':<14}{'dim':>4}{'side':>6}{'modes':>8}"
    for name, *_ in backends:
        header += f"{name + ' [s]':>14}"
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))

    for side in sides:
        coords, vals, idx, acc2, idx1, idx2n, acc3 = box_inputs(args.dim, side)
        jobs = [
            ("convolve", lambda conv, x1, st: conv(idx, vals, idx, vals,
                                                   np.zeros_like(acc2))),
            ("xi1", lambda conv, x1, st: x1(coords, vals, coords, vals, coords,
                                            vals, idx1, idx2n, idx1, t,
                                            np.zeros_like(acc3))),
            ("phase-stats", lambda conv, x1, st: st(coords, coords, coords, t)),
        ]
        for label, job in jobs:
            times = []
            for _, conv, x1, st in backends:
                job(conv, x1, st)  # warmup / JIT compile
                times.append(best_of(args.repeat, lambda: job(conv, x1, st)))
            line = f"{label:<14}{args.dim:>4}{side:>6}{len(vals):>8}"
            for dt in times:
                line += f"{dt:>14.4f}"
            if len(times) == 2 and times[1] > 0:
                line += f"{times[0] / times[1]:>10.1f}"
            print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
