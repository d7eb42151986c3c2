"""Numba vs pure-numpy timings for the integer kernels, plus two end-to-end runs.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is called on the same input through both paths; outputs are
compared before timing.  The end-to-end rows run a full command in a fresh
interpreter with SIMPLELAT_NUMBA=1 and =0, so they include numba compile time.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from simplelat import _kernels as K


def best_of(fn, repeat):
    fn()  # warm-up (triggers compilation on the numba path)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(rng):
    # eta-type product: 1 - q^k for k <= 60, raised to the 24th power, 4000 terms
    idx = np.arange(1, 61, dtype=np.int64)
    val = -np.ones(60, dtype=np.int64)
    yield "series_pow (n=4000, r=24)", lambda f: f(idx, val, 24, 4000), K.series_pow_numpy, K.series_pow_numba

    a = rng.integers(-1000, 1000, size=3000)
    b = rng.integers(-1000, 1000, size=3000)
    yield "cyclic_convolve (p=3000)", lambda f: f(a, b), K.cyclic_convolve_numpy, K.cyclic_convolve_numba

    B = rng.integers(-1, 2, size=(5, 5)) + 4 * np.eye(5)
    R = np.linalg.cholesky(B.T @ B).T
    yield "ellipsoid_points (d=5, r^2=60)", lambda f: f(R, 60.0), K.ellipsoid_points_numpy, K.ellipsoid_points_numba

    n, deg, p = 20000, 12, 2**31 - 1
    f0 = rng.integers(0, p, size=n)
    shift = np.where(rng.random((deg, n)) < 0.7, rng.integers(0, n, size=(deg, n)), -1)
    poly = rng.integers(-50, 50, size=deg)
    yield "apply_factor (n=20000, deg=12, mod p)", lambda f: f(f0, shift, poly, p), K.apply_factor_numpy, K.apply_factor_numba


def end_to_end(argv, repeat):
    out = {}
    for flag in ("1", "0"):
        env = dict(os.environ, SIMPLELAT_NUMBA=flag)
        times = []
        for _ in range(repeat):
            t0 = time.perf_counter()
            subprocess.run([sys.executable, "-m", "simplelat.cli", *argv], env=env, check=True, capture_output=True)
            times.append(time.perf_counter() - t0)
        out[flag] = min(times)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        sys.exit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<40} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for name, call, f_np, f_nb in cases(rng):
        x, y = call(f_np), call(f_nb)
        if isinstance(x, list) or x.ndim > 1:
            same = sorted(map(tuple, np.asarray(x).tolist())) == sorted(map(tuple, np.asarray(y).tolist()))
        else:
            same = np.array_equal(x, y)
        if not same:
            sys.exit(f"{name}: numba and numpy disagree")
        t_np = best_of(lambda: call(f_np), args.repeat)
        t_nb = best_of(lambda: call(f_nb), args.repeat)
        print(f"{name:<40} {t_np:>9.4f}s {t_nb:>9.4f}s {t_np / t_nb:>7.1f}x")

    if args.skip_end_to_end:
        return
    print()
    print(f"{'command (fresh process)':<40} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for argv in (["expand-product", "--case", "level2-cone", "--height", "5"], ["eis", "--case", "level3", "--count", "200"]):
        t = end_to_end(argv, max(1, args.repeat // 2))
        print(f"{' '.join(argv[:3]):<40} {t['0']:>9.2f}s {t['1']:>9.2f}s {t['0'] / t['1']:>7.1f}x")


if __name__ == "__main__":
    main()
