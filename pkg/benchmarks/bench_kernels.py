"""Compare the compiled kernels against the numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py``. Both backends are
imported directly so one process times them side by side.
"""

import argparse
import timeit

import numpy as np

from pdmse import _fallback

try:
    from pdmse import _kernels
except ImportError:
    _kernels = None


def _problem(n, seed=0):
    rng = np.random.default_rng(seed)
    h = 24.0 / (n + 1)
    z = np.linspace(-12, 12, n + 2)[1:-1]
    d = 2.0 / h**2 + z**2 + 1e-3 * rng.standard_normal(n)
    e = np.full(n - 1, -1.0 / h**2)
    return d, e


def _cases(mod, n):
    d, e = _problem(n)
    rhs = np.ones(n)
    x = np.linspace(-0.99, 0.99, n).astype(complex)
    return {
        "tridiag_eigvals(k=8)": lambda: mod.tridiag_eigvals(d, e, 8),
        "sturm_count": lambda: mod.sturm_count(d, e, 10.0),
        "tridiag_solve_shifted": lambda: mod.tridiag_solve_shifted(d, e, 1.0 + 1e-6, rhs),
        "jacobi_recurrence(n=20)": lambda: mod.jacobi_recurrence(20, 0.5 + 1j, -0.5 - 1j, x),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4001)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    backends = [("python", _fallback)]
    if _kernels is not None:
        backends.insert(0, ("cython", _kernels))
    else:
        print("compiled extension not built; timing the fallback only")

    timings = {}
    for name, mod in backends:
        for case, fn in _cases(mod, args.n).items():
            fn()
            best = min(timeit.repeat(fn, number=1, repeat=args.repeat))
            timings.setdefault(case, {})[name] = best

    print(f"{'kernel':28s} {'cython [ms]':>12s} {'python [ms]':>12s} {'speedup':>8s}")
    for case, t in timings.items():
        cy = t.get("cython")
        py = t["python"]
        cy_s = f"{1e3 * cy:12.3f}" if cy is not None else f"{'-':>12s}"
        sp = f"{py / cy:8.1f}" if cy else f"{'-':>8s}"
        print(f"{case:28s} {cy_s} {1e3 * py:12.3f} {sp}")


if __name__ == "__main__":
    main()
