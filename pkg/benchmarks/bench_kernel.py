"""Time the compiled and pure-Python kernels on the same solves.

Usage: python3 benchmarks/bench_kernel.py [--eps 0.25] [--repeat 3]

Prints microseconds per iteration for each backend, the speedup, and
whether both produced bit-identical solutions.
"""

import argparse
import time

import numpy as np

from packcover import kernel
from packcover.instance import build_raw, prepare
from packcover.solver import solve


def random_instance(m, n, seed):
    rng = np.random.default_rng(seed)
    a = rng.uniform(1.0, 10.0, (m, n))
    entries = [(i, j, a[i, j]) for i in range(m) for j in range(n)]
    return build_raw(entries, np.ones(m), np.ones(n))


def best_time(inst, eps, backend, repeat, debug):
    best = float("inf")
    report = None
    for _ in range(repeat):
        start = time.perf_counter()
        report = solve(inst, eps, backend=backend, debug=debug)
        best = min(best, time.perf_counter() - start)
    return best, report


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--eps", type=float, default=0.25)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--debug", action="store_true", help="time with invariant checks on")
    args = parser.parse_args()

    if "compiled" not in kernel.BACKENDS:
        print("compiled kernel not built; only the Python fallback is available")
    shapes = [(1, 1), (2, 2), (4, 4), (6, 6)]
    print(f"eps={args.eps} debug={args.debug}")
    print(f"{'shape':>6} {'iters':>8} {'python us/it':>13} {'compiled us/it':>15} {'speedup':>8} same")
    for m, n in shapes:
        inst = prepare(random_instance(m, n, seed=m * 10 + n), args.eps)
        t_py, r_py = best_time(inst, args.eps, "python", 1, args.debug)
        row = f"{m}x{n:<4} {r_py.iterations:>8} {t_py / r_py.iterations * 1e6:>13.3f}"
        if "compiled" in kernel.BACKENDS:
            t_c, r_c = best_time(inst, args.eps, "compiled", args.repeat, args.debug)
            same = np.array_equal(r_c.x_scaled, r_py.x_scaled) and np.array_equal(
                r_c.y_bar_scaled, r_py.y_bar_scaled
            )
            row += f" {t_c / r_c.iterations * 1e6:>15.3f} {t_py / t_c:>8.1f} {same}"
        print(row)


if __name__ == "__main__":
    main()
