"""Compare the compiled and pure-Python kernels.

Usage::

    python3 benchmarks/bench_backends.py [--repeat N]

Prints the best-of-N wall time per kernel and backend, the speed-up and the
largest difference between the two backends' results.
"""
import argparse
import math
import timeit

import numpy as np

from berryoptics import _backend


def _cases():
    two_level = (0, 40.0, None, 40.5, 20.0, 0.5, True, -40.0, 40.0, 0j, 1 + 0j, 1e-10, 1e-12)
    gauss = (1, 40.0, None, 40.0, 40.0, 0.0, True, -12.0, 12.0, 0j, 1 + 0j, 1e-10, 1e-12)
    return {
        "integrate_two_level eckart": (lambda k: k.integrate_two_level(*two_level),
                                       lambda r: np.concatenate([r["amp_e"][-1:], r["amp_g"][-1:]])),
        "integrate_two_level gaussian": (lambda k: k.integrate_two_level(*gauss),
                                         lambda r: np.concatenate([r["amp_e"][-1:], r["amp_g"][-1:]])),
        "winding_terms N=2000": (lambda k: k.winding_terms(2000, 1.0, 4 * math.pi), np.asarray),
        "compensated_sum 1e5": (lambda k: k.compensated_sum(np.linspace(-1, 1, 100_001) ** 3),
                                lambda r: np.array([r])),
    }


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if not _backend.HAS_COMPILED:
        print("compiled extension not available; build with `pip install -e . --no-build-isolation`")
        return 1
    pure, fast = _backend.kernels("python"), _backend.kernels("compiled")
    print(f"{'kernel':32s} {'python [ms]':>12s} {'compiled [ms]':>14s} {'speed-up':>9s} {'max diff':>10s}")
    for name, (call, values) in _cases().items():
        t_pure = min(timeit.repeat(lambda: call(pure), number=1, repeat=args.repeat))
        t_fast = min(timeit.repeat(lambda: call(fast), number=1, repeat=args.repeat))
        diff = float(np.max(np.abs(values(call(pure)) - values(call(fast)))))
        print(f"{name:32s} {1e3 * t_pure:12.2f} {1e3 * t_fast:14.3f} {t_pure / t_fast:9.1f} {diff:10.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
