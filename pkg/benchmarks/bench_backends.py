"""Compare the numba and numpy walk kernels on identical random streams.

Run: python3 benchmarks/bench_backends.py --walkers 100000 --steps 50 --repeats 3
"""
import argparse
import time

import numpy as np

from tlevy import kernels


def time_backend(backend, args, base, record):
    best = float("inf")
    out = None
    for _ in range(args.repeats):
        t0 = time.perf_counter()
        out = kernels.walk_positions(args.alpha, 1.0, args.ell, args.family, args.h, base,
                                     args.walkers, args.steps, record, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--walkers", type=int, default=100_000)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--alpha", type=float, default=1.5)
    p.add_argument("--ell", type=float, default=50.0)
    p.add_argument("--family", default="exp", choices=sorted(kernels.FAMILY_CODES))
    p.add_argument("--h", type=float, default=2.0)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=7)
    args = p.parse_args()

    base = kernels.stream_base(args.seed)
    record = np.array([1, args.steps])
    # compile once outside the timed region
    kernels.walk_positions(args.alpha, 1.0, args.ell, args.family, args.h, base, 10, 2,
                           np.array([1, 2]), backend="numba")

    t_np, x_np = time_backend("numpy", args, base, record)
    t_nb, x_nb = time_backend("numba", args, base, record)
    draws = args.walkers * args.steps
    print(f"numpy : {t_np:8.3f} s  ({draws / t_np / 1e6:6.2f} M increments/s)")
    print(f"numba : {t_nb:8.3f} s  ({draws / t_nb / 1e6:6.2f} M increments/s)")
    print(f"speedup: {t_np / t_nb:.2f}x")
    rel = np.max(np.abs(x_nb - x_np) / np.maximum(1.0, np.abs(x_np)))
    print(f"max relative difference between backends: {rel:.3g}")


if __name__ == "__main__":
    main()
