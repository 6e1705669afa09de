"""Compare the compiled and pure-Python Monte Carlo kernels.

Usage: python benchmarks/bench_kernels.py [--reps 4000] [--repeat 3]

For each shape the script times `simulate_extremes` on both backends,
checks the draws are bit-identical, and reports replications per second.
"""
import argparse
import time

import numpy as np

from twedge import _backend
from twedge.sampler import Tridiagonal, extreme_eigenvalue, simulate_extremes
from twedge.scaling import Shape

SHAPES = [(2, 2), (20, 5), (100, 25), (100, 100), (400, 100), (10000, 10)]


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_simulation(reps, repeat, backends):
    print(f"simulate_extremes, {reps} replications, best of {repeat}")
    header = f"{'shape':>10}" + "".join(f"{b + ' reps/s':>20}" for b in backends)
    if len(backends) == 2:
        header += f"{'speed-up':>10}{'identical':>11}"
    print(header)
    for n, p in SHAPES:
        shape = Shape(n, p)
        rates, outs = [], []
        for b in backends:
            t, out = best_time(lambda: simulate_extremes(shape, reps, 1, threads=1, backend=b), repeat)
            rates.append(reps / t)
            outs.append(out)
        line = f"{str(shape):>10}" + "".join(f"{r:20.0f}" for r in rates)
        if len(backends) == 2:
            same = all(np.array_equal(x, y) for x, y in zip(outs[0][:2], outs[1][:2]))
            line += f"{rates[0] / rates[1]:10.1f}{str(same):>11}"
        print(line)


def bench_bisection(count, backends):
    print(f"\nextreme_eigenvalue on {count} random 100x100 tridiagonals")
    rng = np.random.default_rng(0)
    mats = [Tridiagonal(rng.uniform(1, 10, 100), rng.uniform(-2, 2, 99)) for _ in range(count)]
    for b in backends:
        kernels = _backend.get(b)
        t0 = time.perf_counter()
        for T in mats:
            kernels.extreme_eigenvalue(T.diag, T.offdiag, True, 1e-12)
        dt = time.perf_counter() - t0
        print(f"{b:>10}: {count / dt:10.0f} solves/s")
    # public wrapper for reference
    t0 = time.perf_counter()
    for T in mats:
        extreme_eigenvalue(T, "largest")
    print(f"{'default':>10}: {count / (time.perf_counter() - t0):10.0f} solves/s ({_backend.NAME})")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--reps", type=int, default=4000)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--solves", type=int, default=500)
    args = parser.parse_args()
    backends = ["compiled", "python"] if _backend.compiled_kernels is not None else ["python"]
    if len(backends) == 1:
        print("compiled extension not built; timing the Python kernels only")
    bench_simulation(args.reps, args.repeat, backends)
    bench_bisection(args.solves, backends)


if __name__ == "__main__":
    main()
