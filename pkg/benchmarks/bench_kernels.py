"""Compare the numba and numpy kernels on desk-scale workloads.

    python benchmarks/bench_kernels.py [--repeat 5]

Both backends are imported in the same process; the numba functions are
compiled once before timing.
"""

import argparse
import time

import numpy as np

from detrep import BallShape, det_poly
from detrep import _kernels as kern
from detrep.core import random_scalar_points


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def workloads(rng):
    # evaluation: an 8 x 8 pencil determinant, the stability-sampling hot loop
    shape = BallShape([(2, 2), (1, 2)])
    n = (2, 2)
    K = rng.standard_normal((8, 6)) + 1j * rng.standard_normal((8, 6))
    K *= 0.9 / np.linalg.norm(K, 2)
    p = det_poly(K, n, shape)
    ptr, var, exp, coef = p._csr
    pts = np.ascontiguousarray(random_scalar_points(shape, 10_000, 1.0, 0))
    yield (f"eval_terms  ({len(p)} terms x {len(pts)} points)",
           lambda f: f(ptr, var, exp, coef, pts), kern.eval_terms_numpy, getattr(kern, "eval_terms_numba", None))

    # multiplication: packed sparse products of the size met inside the cofactor expansion,
    # once with scattered keys and once with keys filling a compact range
    for label, hi in (("scattered", 1 << 30), ("compact", 1 << 12)):
        k1 = np.unique(rng.integers(0, hi, 3000)).astype(np.int64)
        k2 = np.unique(rng.integers(0, hi, 300)).astype(np.int64)
        c1 = rng.standard_normal(k1.size) + 0j
        c2 = rng.standard_normal(k2.size) + 0j
        yield (f"mul_packed  ({k1.size} x {k2.size} terms, {label})",
               lambda f, k1=k1, c1=c1, k2=k2, c2=c2: f(k1, c1, k2, c2),
               kern.mul_packed_numpy, getattr(kern, "mul_packed_numba", None))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"numba available: {kern.HAS_NUMBA}")
    for name, call, f_np, f_nb in workloads(rng):
        t_np = best_of(lambda: call(f_np), args.repeat)
        if f_nb is None:
            print(f"{name}: numpy {t_np * 1e3:8.2f} ms   numba  n/a")
            continue
        a, b = call(f_np), call(f_nb)  # also compiles
        agree = all(np.allclose(x, y) for x, y in zip(a, b)) if isinstance(a, tuple) else np.allclose(a, b)
        t_nb = best_of(lambda: call(f_nb), args.repeat)
        print(f"{name}: numpy {t_np * 1e3:8.2f} ms   numba {t_nb * 1e3:8.2f} ms   "
              f"speedup {t_np / t_nb:5.1f}x   agree={agree}")


if __name__ == "__main__":
    main()
