"""Time the F_p row-reduction kernels: numba against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--sizes 50 100 200 400] [--prime 32003]

The first numba call includes compilation and is timed separately.
"""

import argparse
import time

import numpy as np

from tateforge._kernels import numpy_kernels


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200, 400])
    ap.add_argument("--prime", type=int, default=32003)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    try:
        from tateforge._kernels import numba_kernels
    except ImportError:
        numba_kernels = None
        print("numba is not importable; timing the numpy kernel only")

    rng = np.random.default_rng(args.seed)
    if numba_kernels is not None:
        warm = rng.integers(0, args.prime, size=(8, 8))
        t0 = time.perf_counter()
        numba_kernels.rref_mod_p(warm, args.prime)
        print(f"numba first call (compile or cache load): {time.perf_counter() - t0:.3f}s")
    print(f"{'size':>6} {'rank':>6} {'numpy s':>10} {'numba s':>10} {'speedup':>8}")
    for n in args.sizes:
        # rank-deficient on purpose so both pivot and non-pivot columns occur
        a = rng.integers(0, args.prime, size=(n, n // 2)) @ rng.integers(0, args.prime, size=(n // 2, n))
        a %= args.prime
        r_np, piv_np = numpy_kernels.rref_mod_p(a, args.prime)
        t_np = best_of(lambda: numpy_kernels.rref_mod_p(a, args.prime), args.repeats)
        if numba_kernels is None:
            print(f"{n:>6} {len(piv_np):>6} {t_np:>10.4f} {'-':>10} {'-':>8}")
            continue
        r_nb, piv_nb = numba_kernels.rref_mod_p(a, args.prime)
        if not (np.array_equal(r_np, r_nb) and np.array_equal(piv_np, piv_nb)):
            raise SystemExit(f"kernels disagree at size {n}")
        t_nb = best_of(lambda: numba_kernels.rref_mod_p(a, args.prime), args.repeats)
        print(f"{n:>6} {len(piv_np):>6} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
