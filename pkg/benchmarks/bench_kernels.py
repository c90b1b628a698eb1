"""Time the compiled grid kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--size 2048] [--repeat 5]
"""
import argparse
import time

import numpy as np

from expiso import _kernels_py, kernels

try:
    from expiso import _kernels as compiled
except ImportError:
    compiled = None


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(size):
    rng = np.random.default_rng(0)
    occ = rng.random((size, size)) < 0.3
    cap = 64
    base = np.where(occ, 0, cap).astype(np.uint8)
    weights = [np.exp(-np.arange(size) / size), np.exp(-np.arange(size) / size)]

    def sweep(impl):
        d = base.copy()
        for axis in (0, 1):
            kernels.axis_pass(d, axis, True, False, cap, impl=impl)
            kernels.axis_pass(d, axis, False, False, cap, impl=impl)
        return d

    dist = sweep(_kernels_py)
    return {
        "axis_pass x4": sweep,
        "mass_histogram": lambda impl: kernels.mass_histogram(dist, weights, cap + 1, impl=impl),
        "diagonal_counts": lambda impl: kernels.diagonal_counts(occ, impl=impl),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=2048)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    print(f"grid {args.size}x{args.size}, best of {args.repeat}")
    if compiled is None:
        print("compiled extension not built; run: python3 setup.py build_ext --inplace")
    print(f"{'kernel':<18} {'numpy [s]':>10} {'compiled [s]':>13} {'speedup':>8}")
    for name, fn in cases(args.size).items():
        ref = fn(_kernels_py)
        t_py = _best(lambda: fn(_kernels_py), args.repeat)
        if compiled is None:
            print(f"{name:<18} {t_py:>10.4f} {'-':>13} {'-':>8}")
            continue
        out = fn(compiled)
        if not np.allclose(ref, out, rtol=1e-12, atol=0):
            raise SystemExit(f"{name}: backends disagree")
        t_c = _best(lambda: fn(compiled), args.repeat)
        print(f"{name:<18} {t_py:>10.4f} {t_c:>13.4f} {t_py / t_c:>7.1f}x")


if __name__ == "__main__":
    main()
