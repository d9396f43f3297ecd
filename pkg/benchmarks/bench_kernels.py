"""Benchmark: compiled kernels vs the NumPy reference backend.

Times the two hot operations at the sizes that dominate the rate
experiments (1-d, full band K = n) and a representative 2-d load.

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from advdens._kernels import _ref

try:
    from advdens._kernels import _fastk
except ImportError:
    _fastk = None


def run(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def fast_coeffs(pts, band):
    d = pts.shape[1]
    if d == 1:
        return _fastk.coeff_partials_1d(pts[:, 0], band, _fastk.N_CHUNKS).sum(axis=0) / len(pts)
    return _fastk.coeff_partials_2d(pts, band, _fastk.N_CHUNKS).sum(axis=0) / len(pts)


def fast_eval(cf, pts):
    if pts.shape[1] == 1:
        return _fastk.eval_series_1d(cf, pts[:, 0])
    return _fastk.eval_series_2d(cf, pts, _fastk.N_CHUNKS)


def main():
    rng = np.random.default_rng(0)
    cases = [
        ("coeffs d=1 n=4096 band=4096", lambda: rng.random((4096, 1)), 4096, "coeffs"),
        ("eval   d=1 n=8192 band=4096", lambda: rng.random((8192, 1)), 4096, "eval"),
        ("coeffs d=2 n=20000 band=64", lambda: rng.random((20000, 2)), 64, "coeffs"),
        ("eval   d=2 n=20000 band=64", lambda: rng.random((20000, 2)), 64, "eval"),
    ]
    print(f"{'case':34s} {'numpy':>10s} {'cython':>10s} {'speedup':>8s}")
    for name, make, band, op in cases:
        pts = make()
        if op == "coeffs":
            t_ref = run(lambda: _ref.empirical_coeff_tensor(pts, band))
            t_fast = run(lambda: fast_coeffs(pts, band)) if _fastk else float("nan")
            if _fastk:
                err = np.max(np.abs(_ref.empirical_coeff_tensor(pts, band) - fast_coeffs(pts, band)))
        else:
            shape = (band + 1,) * pts.shape[1]
            cf = np.ascontiguousarray(rng.standard_normal(shape) * 0.01)
            t_ref = run(lambda: _ref.eval_coeff_tensor(cf, pts))
            t_fast = run(lambda: fast_eval(cf, pts)) if _fastk else float("nan")
            if _fastk:
                err = np.max(np.abs(_ref.eval_coeff_tensor(cf, pts) - fast_eval(cf, pts)))
        speed = t_ref / t_fast if _fastk else float("nan")
        print(f"{name:34s} {t_ref * 1e3:9.2f}ms {t_fast * 1e3:9.2f}ms {speed:7.1f}x"
              + (f"   max|diff|={err:.2e}" if _fastk else "   (extension not built)"))


if __name__ == "__main__":
    main()
