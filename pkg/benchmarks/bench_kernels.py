"""Compiled kernel against the numpy fallback on the integer-point sums.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Prints one line per case with the best wall time of each backend, the
speedup and whether the two sums agree bit for bit.
"""

import argparse
import time

import numpy as np

from riemannsum import _backend, _fallback
from riemannsum._fallback import F_BALL, F_BUMP, SET_ALL, SET_ODD_PRIM, SET_PRIM

try:
    from riemannsum import _kernels
except ImportError:
    _kernels = None

CASES = [
    ("Z^2 ball", 2, SET_ALL, F_BALL, [0.0, 0.0, 1.0], 1e-3, None),
    ("Z^2_prim ball", 2, SET_PRIM, F_BALL, [0.0, 0.0, 1.0], 1e-3, None),
    ("odd prim ball", 2, SET_ODD_PRIM, F_BALL, [0.0, 0.0, 1.0], 1e-3, None),
    ("Z^2_prim twisted", 2, SET_PRIM, F_BALL, [0.0, 0.0, 1.0], 1e-3, ([1, 0], 2)),
    ("Z^2_prim bump", 2, SET_PRIM, F_BUMP, [0.0, 0.0, 1.0], 2e-3, None),
    ("Z^3_prim ball", 3, SET_PRIM, F_BALL, [0.0, 0.0, 0.0, 1.0], 2 ** -7, None),
]


def run(impl, dim, set_code, f_code, fp, eps, twist):
    b = int(1 / eps) + 1
    return _backend.integer_sum(dim, set_code, f_code, np.array(fp), eps, 0.0, eps ** dim,
                                [-b] * dim, [b] * dim, (1 / eps) ** 2, twist=twist, impl=impl)


def best(fn, repeat):
    out, times = None, []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return out, min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels is None:
        raise SystemExit("compiled kernel not built; run pip install -e . first")
    print(f"{'case':<18} {'compiled s':>11} {'fallback s':>11} {'speedup':>8}  same")
    for name, *case in CASES:
        a, ta = best(lambda: run(_kernels, *case), args.repeat)
        b, tb = best(lambda: run(_fallback, *case), args.repeat)
        print(f"{name:<18} {ta:11.4f} {tb:11.4f} {tb / ta:8.1f}  {a == b}")


if __name__ == "__main__":
    main()
