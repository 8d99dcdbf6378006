"""Compare the compiled kernels against the pure-Python fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints the best-of-``repeat`` wall time for each kernel and backend and
checks that both backends return the same numbers.
"""
import argparse
import timeit

import numpy as np

from sirthreshold import _pykernels

try:
    from sirthreshold import _kernels
except ImportError:
    _kernels = None

# Example scenario: N=100, gamma=1/3, R0=2.5, dt=1e-3/gamma, 60/gamma horizon.
RK4_ARGS = (1 / 3 * 2.5 / 100, 1 / 3, 99.0, 1.0, 0.0, 0.0, 3e-3, 60_000)
SIMPSON_ARGS = (40.0, 99.0, 90.0, 0.15448716347521535, 0.837385614344032, 2 ** 16, True)


def best(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    opts = parser.parse_args()

    cases = [("rk4_sir (60000 steps)", "rk4_sir", RK4_ARGS),
             ("simpson_excess (65536 panels)", "simpson_excess", SIMPSON_ARGS)]
    print(f"{'kernel':32s} {'python':>12s} {'compiled':>12s} {'speedup':>8s}")
    for label, name, args in cases:
        py = best(getattr(_pykernels, name), args, opts.repeat)
        if _kernels is None:
            print(f"{label:32s} {py * 1e3:10.2f}ms {'n/a':>12s} {'n/a':>8s}")
            continue
        fast = best(getattr(_kernels, name), args, opts.repeat)
        a, b = getattr(_pykernels, name)(*args), getattr(_kernels, name)(*args)
        same = np.array_equal(a, b) if name == "rk4_sir" else abs(a - b) <= 1e-13 * abs(a)
        print(f"{label:32s} {py * 1e3:10.2f}ms {fast * 1e3:10.2f}ms {py / fast:7.1f}x"
              f"{'' if same else '  MISMATCH'}")


if __name__ == "__main__":
    main()
