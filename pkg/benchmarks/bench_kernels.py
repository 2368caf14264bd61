"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from magline import _pykernels

try:
    from magline import _ckernels
except ImportError:
    _ckernels = None

ANNULUS = np.array([2.0, 0.0, 0.0, 0.0, 0.0, 1.0])


def cases(mod):
    times = np.arange(2001) * 0.01
    u = np.linspace(-50, 50, 20_000)
    rng = np.random.default_rng(0)
    xyz = rng.uniform(0.01, 4.0, size=(2000, 3))
    omega, b = np.array([0.0, 0.0, 1.0]), np.zeros(3)
    return {
        "dopri annulus t<=20": lambda: mod.dopri_linear(omega, b, ANNULUS, times, 1e-10, 1e-10, 0.1),
        "sncndn_array 2e4 pts": lambda: mod.sncndn_array(u, 0.8),
        "carlson_rf x2000": lambda: [mod.carlson_rf(*row) for row in xyz],
    }


def best_of(fn, repeat):
    n, _ = timeit.Timer(fn).autorange()
    return min(timeit.repeat(fn, number=n, repeat=repeat)) / n


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    py = cases(_pykernels)
    cy = cases(_ckernels) if _ckernels is not None else {}
    print(f"{'kernel':24s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speed-up':>9s}")
    for name, fn in py.items():
        tp = best_of(fn, args.repeat) * 1e3
        if name in cy:
            tc = best_of(cy[name], args.repeat) * 1e3
            print(f"{name:24s} {tp:12.3f} {tc:12.3f} {tp / tc:8.1f}x")
        else:
            print(f"{name:24s} {tp:12.3f} {'n/a':>12s} {'':>9s}")
    if _ckernels is None:
        print("compiled kernels not built; only the fallback was timed")


if __name__ == "__main__":
    main()
