"""Kernel selection.

The compiled extension is used when importable, unless the environment
variable ``RIEMANNSUM_PURE_PYTHON`` is set to a non-empty value other than
``0``. ``RIEMANNSUM_NUM_THREADS`` caps the worker threads used to split a
compiled sum over the outermost coordinate (default: CPU count).
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _fallback

_force_python = os.environ.get("RIEMANNSUM_PURE_PYTHON", "") not in ("", "0")

try:
    if _force_python:
        raise ImportError("pure-Python backend requested")
    from . import _kernels as _impl
    BACKEND = "compiled"
except ImportError:
    _impl = _fallback
    BACKEND = "python"


def num_threads():
    env = os.environ.get("RIEMANNSUM_NUM_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _as_arrays(fparams, lo, hi, twist_num, cos_tab, sin_tab):
    return (
        np.ascontiguousarray(fparams, dtype=np.float64),
        np.ascontiguousarray(lo, dtype=np.int_),
        np.ascontiguousarray(hi, dtype=np.int_),
        np.ascontiguousarray(twist_num, dtype=np.int_),
        np.ascontiguousarray(cos_tab, dtype=np.float64),
        np.ascontiguousarray(sin_tab, dtype=np.float64),
    )


def integer_sum(dim, set_code, f_code, fparams, step, offset, scale,
                lo, hi, radius2=-1.0, twist=None, impl=None):
    """Exact-summed Riemann sum over a filtered integer box / ball.

    ``twist`` is ``(numerators, denominator)`` for the weight
    ``exp(2*pi*i*<z, numerators>/denominator)``. Returns
    ``(complex value, number of nonzero terms)``.
    """
    impl = impl or _impl
    if twist is None:
        tnum, tden = np.zeros(dim, dtype=np.int_), 0
        ctab = stab = np.zeros(1)
    else:
        tnum, tden = np.asarray(twist[0], dtype=np.int_), int(twist[1])
        ctab, stab = twist_tables(tden)
    fparams, lo, hi, tnum, ctab, stab = _as_arrays(fparams, lo, hi, tnum, ctab, stab)

    chunks = [(lo, hi)]
    workers = num_threads() if impl is not _fallback else 1
    span = int(hi[0]) - int(lo[0]) + 1
    if workers > 1 and span >= 4 * workers:
        edges = np.linspace(int(lo[0]), int(hi[0]) + 1, workers + 1).astype(int)
        chunks = []
        for a, b in zip(edges[:-1], edges[1:]):
            clo, chi = lo.copy(), hi.copy()
            clo[0], chi[0] = a, b - 1
            chunks.append((clo, chi))

    def run(bounds):
        return impl.integer_sum(dim, set_code, f_code, fparams, float(step),
                                float(offset), float(scale), bounds[0], bounds[1],
                                float(radius2), tnum, tden, ctab, stab)

    if len(chunks) == 1:
        results = [run(chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, chunks))
    re = math.fsum(p for r in results for p in r[0])
    im = math.fsum(p for r in results for p in r[1])
    return complex(re, im), sum(r[2] for r in results)


def twist_tables(den):
    """cos/sin of 2*pi*r/den for r = 0..den-1, shared by both backends."""
    ctab = np.array([math.cos(2.0 * math.pi * r / den) for r in range(den)])
    stab = np.array([math.sin(2.0 * math.pi * r / den) for r in range(den)])
    # exact values at the quarter turns keep integer twists real
    for r in range(den):
        if (4 * r) % den == 0:
            q = (4 * r) // den
            ctab[r], stab[r] = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)][q]
    return ctab, stab


def linear_sieve(K, impl=None):
    return (impl or _impl).linear_sieve(int(K))
