"""Timings of the numba kernels against the pure-numpy fallback.

Runs the two hot paths (pairwise mixture marginals for one big batch, and
the stacked replicate marginals the simulation harness uses) under both
backends and prints a table.  Usage:

    python benchmarks/bench_backends.py [--m 2000] [--replicates 400]
"""

import argparse
import time

import numpy as np

from ebfkit import _kernels as K


def time_call(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--m", type=int, default=2000,
                        help="batch size for the pairwise kernel")
    parser.add_argument("--replicates", type=int, default=400,
                        help="replicate count for the harness kernel")
    parser.add_argument("--tests", type=int, default=10,
                        help="tests per replicate for the harness kernel")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    x = rng.standard_normal(args.m)
    se = np.exp(0.2 * rng.standard_normal(args.m))
    xr = rng.standard_normal((args.replicates, args.tests))
    cr = xr + 0.1 * rng.standard_normal(xr.shape)

    cases = {
        f"mixture marginals (m={args.m}, interval region)":
            lambda: K.mixture_log_marginals(x, se, K.KIND_INTERVAL, -1.0, 1.0,
                                            0.5, 0.5),
        f"mixture marginals (m={args.m}, full line)":
            lambda: K.mixture_log_marginals(x, se, K.KIND_FULL, 0.0, 0.0,
                                            1.0, 0.5),
        f"replicate marginals ({args.replicates} x {args.tests})":
            lambda: K.replicate_mixture_log_marginals(xr, cr, 0.01, 1.0, -0.5),
    }

    available = K.available_backends()
    if "numba" in available:
        K.set_backend("numba")
        for fn in cases.values():  # compile outside the timed region
            fn()

    print(f"{'kernel':<46} " + " ".join(f"{b:>12}" for b in available)
          + "      speedup")
    results = {}
    for name, fn in cases.items():
        times = {}
        for backend in available:
            K.set_backend(backend)
            times[backend], out = time_call(fn)
            results.setdefault(name, {})[backend] = out
        row = " ".join(f"{times[b] * 1e3:>10.2f}ms" for b in available)
        speedup = (f"{times['numpy'] / times['numba']:>9.1f}x"
                   if len(available) > 1 else "        n/a")
        print(f"{name:<46} {row} {speedup}")

    if len(available) > 1:
        worst = max(
            float(np.max(np.abs(vals["numba"] - vals["numpy"])))
            for vals in results.values())
        print(f"\nmax |numba - numpy| across outputs: {worst:.3e}")
    K.set_backend(available[0])


if __name__ == "__main__":
    main()
