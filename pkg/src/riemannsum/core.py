"""Generalized Riemann sums over weighted discrete sets.

A weighted discrete set is anything implementing :class:`WeightedPointSource`;
its Riemann sum against a scaled test function ``f^eps(x) = eps^d f(eps x)``
is :func:`riemann_sum`. Integer point sets (all of Z^d, primitive points and
their parity variants, optionally twisted by a rational character) are summed
by the compiled kernel; everything else goes through a vectorized path.

All floating sums are exact-summed (``math.fsum`` semantics), so the value
does not depend on enumeration order or thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import special
from scipy.spatial import cKDTree

from . import _backend
from ._fallback import (F_BALL, F_BOX, F_BUMP, F_SECTOR, SET_ALL, SET_NONZERO,
                        SET_ODD, SET_ODD_PRIM, SET_PRIM, SET_PRIM_STAR,
                        _feval, _member_mask, _points)

__all__ = [
    "TestFunction", "box_indicator", "ball_indicator", "sector_indicator",
    "smooth_bump", "combination", "WeightedPointSource", "IntegerPointSet",
    "ExplicitPointSource", "DensityEstimate", "DeloneReport", "riemann_sum",
    "estimate_density", "partition_riemann_sum", "integral", "delone_check",
    "delone_density_bounds", "default_schedule", "fit_intercept",
]


# ---------------------------------------------------------------------------
# test functions

@dataclass(frozen=True)
class TestFunction:
    """Compactly supported test function on R^d.

    ``params`` depends on ``kind``:

    * ``box``: ``(lo, hi)`` tuples, closed box indicator
    * ``ball``: ``(center, radius)``, closed ball indicator
    * ``sector``: ``(alpha, beta, radius)``, d = 2
    * ``bump``: ``(center, radius)``, ``exp(-1/(1 - |x-c|^2/r^2))`` inside
    * ``combo``: tuple of ``(coefficient, TestFunction)``
    """

    __test__ = False  # not a pytest class

    kind: str
    dimension: int
    params: tuple
    center: tuple
    support_radius: float
    exact_integral: Optional[float] = None
    exact_ft: Optional[Callable] = field(default=None, compare=False)

    def __call__(self, x):
        """Evaluate at points ``x`` of shape ``(..., d)``."""
        x = np.asarray(x, dtype=float)
        pts = x.reshape(-1, self.dimension)
        if self.kind == "combo":
            out = np.zeros(len(pts))
            for c, g in self.params:
                c = complex(c)
                out = out + (c.real if c.imag == 0 else c) * g(pts)
        else:
            code, fp = self.kernel_spec()
            out = _feval(pts, code, fp)
        return out.reshape(x.shape[:-1])

    def kernel_spec(self):
        """``(f_code, fparams)`` understood by the compiled kernel."""
        d = self.dimension
        if self.kind == "box":
            lo, hi = self.params
            return F_BOX, np.array(list(lo) + list(hi), dtype=float)
        if self.kind == "ball":
            c, r = self.params
            return F_BALL, np.array(list(c) + [r * r], dtype=float)
        if self.kind == "sector":
            a, b, r = self.params
            return F_SECTOR, np.array([a, b, r * r], dtype=float)
        if self.kind == "bump":
            c, r = self.params
            return F_BUMP, np.array(list(c) + [r * r], dtype=float)
        raise ValueError(f"no kernel form for {self.kind!r} in dimension {d}")

    def exact_value(self, point):
        """Exact rational value at a rational point (indicators only)."""
        p = [Fraction(v) for v in point]
        if self.kind == "box":
            lo, hi = self.params
            return Fraction(int(all(Fraction(a) <= v <= Fraction(b)
                                    for v, a, b in zip(p, lo, hi))))
        if self.kind == "ball":
            c, r = self.params
            s = sum((v - Fraction(ci)) ** 2 for v, ci in zip(p, c))
            return Fraction(int(s <= Fraction(r) ** 2))
        if self.kind == "sector":
            a, b, r = (Fraction(t) for t in self.params)
            x, y = p
            ok = x > 0 and y > 0 and a * x <= y <= b * x and x * x + y * y <= r * r
            return Fraction(int(ok))
        if self.kind == "combo":
            return sum((Fraction(c) * g.exact_value(point) for c, g in self.params),
                       Fraction(0))
        raise ValueError("exact evaluation is only defined for indicators")


def box_indicator(lo: Sequence[float], hi: Sequence[float]) -> TestFunction:
    lo, hi = tuple(float(v) for v in lo), tuple(float(v) for v in hi)
    if len(lo) != len(hi) or any(a > b for a, b in zip(lo, hi)):
        raise ValueError("box needs lo <= hi per axis")
    center = tuple((a + b) / 2 for a, b in zip(lo, hi))
    half_diag = math.sqrt(sum(((b - a) / 2) ** 2 for a, b in zip(lo, hi)))
    vol = math.prod(b - a for a, b in zip(lo, hi))

    def ft(xi):
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        out = np.ones(len(xi), dtype=complex)
        for i, (a, b) in enumerate(zip(lo, hi)):
            w, c = b - a, (a + b) / 2
            out *= w * np.sinc(w * xi[:, i]) * np.exp(-2j * np.pi * c * xi[:, i])
        return out

    return TestFunction("box", len(lo), (lo, hi), center, half_diag, vol, ft)


def ball_indicator(center: Sequence[float], radius: float) -> TestFunction:
    c = tuple(float(v) for v in center)
    d = len(c)
    r = float(radius)
    if r < 0:
        raise ValueError("radius must be >= 0")
    vol = math.pi ** (d / 2) / math.gamma(d / 2 + 1) * r ** d

    def ft(xi):
        # hat(chi_B)(xi) = r^d J_{d/2}(2 pi r |xi|) / (r |xi|)^{d/2}, phase for center
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        s = np.linalg.norm(xi, axis=1)
        out = np.full(len(xi), vol, dtype=complex)
        nz = s > 0
        out[nz] = r ** d * special.jv(d / 2, 2 * np.pi * r * s[nz]) / (r * s[nz]) ** (d / 2)
        return out * np.exp(-2j * np.pi * (xi @ np.array(c)))

    return TestFunction("ball", d, (c, r), c, r, vol, ft)


def sector_indicator(alpha: float, beta: float, radius: float) -> TestFunction:
    """Indicator of ``{x, y > 0, alpha x <= y <= beta x, x^2 + y^2 <= r^2}``."""
    if not 0 <= alpha < beta:
        raise ValueError("need 0 <= alpha < beta")
    area = radius ** 2 * 0.5 * math.atan((beta - alpha) / (1 + alpha * beta))
    return TestFunction("sector", 2, (float(alpha), float(beta), float(radius)),
                        (0.0, 0.0), float(radius), area)


def smooth_bump(center: Sequence[float], radius: float) -> TestFunction:
    c = tuple(float(v) for v in center)
    return TestFunction("bump", len(c), (c, float(radius)), c, float(radius))


def combination(terms: Sequence[tuple]) -> TestFunction:
    """Linear combination ``sum c_i f_i`` of test functions of one dimension."""
    terms = tuple((c, f) for c, f in terms)
    d = terms[0][1].dimension
    if any(f.dimension != d for _, f in terms):
        raise ValueError("dimension mismatch in combination")
    reach = max(math.hypot(*f.center) + f.support_radius for _, f in terms)
    integ = None
    if all(f.exact_integral is not None for _, f in terms):
        integ = sum(float(c) * f.exact_integral for c, f in terms)
    return TestFunction("combo", d, terms, (0.0,) * d, reach, integ)


# ---------------------------------------------------------------------------
# point sources

class WeightedPointSource:
    """Discrete set with nonzero (complex) weights, enumerable by radius.

    Subclasses implement :meth:`enumerate`, returning ``(points, weights)``
    with ``points`` of shape ``(n, d)`` in lexicographic order and exactly the
    points of norm ``<= R``.
    """

    dimension: int
    descriptor: str

    def enumerate(self, R: float):
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.descriptor}>"


_SET_CODES = {
    "all": SET_ALL, "nonzero": SET_NONZERO, "prim": SET_PRIM,
    "prim_star": SET_PRIM_STAR, "odd_prim": SET_ODD_PRIM, "odd": SET_ODD,
}


class IntegerPointSet(WeightedPointSource):
    """Subsets of Z^d defined by gcd/parity, weight 1 or a rational character.

    ``kind`` is one of ``all``, ``nonzero``, ``prim``, ``prim_star``,
    ``odd_prim``, ``odd``. ``twist`` is a rational vector ``eta``; the weight
    is then ``exp(2 pi i <z, eta>)``.
    """

    def __init__(self, dimension: int, kind: str = "all", twist=None):
        if kind not in _SET_CODES:
            raise ValueError(f"unknown integer set kind {kind!r}")
        if kind in ("prim_star", "odd_prim") and dimension != 2:
            raise ValueError(f"{kind} is defined for d = 2 only")
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        self.dimension = dimension
        self.kind = kind
        self.set_code = _SET_CODES[kind]
        self.twist = None
        self._twist_int = None
        if twist is not None:
            eta = tuple(Fraction(v) for v in twist)
            if len(eta) != dimension:
                raise ValueError("twist dimension mismatch")
            den = math.lcm(*(q.denominator for q in eta))
            self.twist = eta
            self._twist_int = ([int(q * den) % den for q in eta], den)
        tw = "" if twist is None else f",eta={[str(q) for q in self.twist]}"
        self.descriptor = f"Z^{dimension}:{kind}{tw}"

    def weights_for(self, z):
        if self._twist_int is None:
            return np.ones(len(z), dtype=complex)
        num, den = self._twist_int
        ctab, stab = _backend.twist_tables(den)
        r = np.mod(z @ np.array(num, dtype=np.int64), den)
        return ctab[r] + 1j * stab[r]

    def enumerate(self, R: float):
        R = float(R)
        if R < 0:
            return np.zeros((0, self.dimension), dtype=np.int64), np.zeros(0, complex)
        b = int(math.floor(R))
        z = _points(self.dimension, [-b] * self.dimension, [b] * self.dimension, R * R)
        z = z[_member_mask(z, self.set_code)]
        return z, self.weights_for(z)


class ExplicitPointSource(WeightedPointSource):
    """A finite point set given explicitly (sorted lexicographically)."""

    def __init__(self, points, weights=None, descriptor="explicit"):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        w = np.ones(len(pts), complex) if weights is None else np.asarray(weights, complex)
        if np.any(w == 0):
            raise ValueError("weights must be nonzero")
        order = np.lexsort(pts.T[::-1]) if len(pts) else np.arange(0)
        self.points, self.weights = pts[order], w[order]
        self.dimension = pts.shape[1]
        self.descriptor = descriptor

    def enumerate(self, R: float):
        keep = np.einsum("ij,ij->i", self.points, self.points) <= float(R) ** 2
        return self.points[keep], self.weights[keep]


# ---------------------------------------------------------------------------
# Riemann sums

def _check(f: TestFunction, src: WeightedPointSource, eps):
    if f.dimension != src.dimension:
        raise ValueError(f"dimension mismatch: f is {f.dimension}-d, "
                         f"source is {src.dimension}-d")
    if not eps > 0:
        raise ValueError("eps must be > 0")


def _reach(f: TestFunction) -> float:
    # relative slack: support points on the sphere |x| = reach must not be
    # lost to rounding (f vanishes beyond its support, so extra radius is free)
    return (math.sqrt(sum(c * c for c in f.center)) + f.support_radius) * (1 + 1e-12)


def riemann_sum(f: TestFunction, src: WeightedPointSource, eps: float,
                exact: bool = False):
    """``sum_z eps^d f(eps z) w(z)`` over the points of ``src``.

    With ``exact=True`` (indicator test functions, unit or rational-character
    weights excluded) the sum is evaluated in rational arithmetic and a
    :class:`~fractions.Fraction` is returned; ``eps`` is then read as a
    rational number.
    """
    _check(f, src, eps)
    d = f.dimension
    if f.support_radius <= 0:
        return Fraction(0) if exact else 0j
    if exact:
        e = Fraction(eps)
        pts, w = src.enumerate(float(_reach(f) / e) + 1e-9)
        if np.any(w != 1):
            raise ValueError("exact mode supports unit weights only")
        total = Fraction(0)
        for p in pts:
            total += f.exact_value([e * Fraction(c.item()) for c in p])
        return total * e ** d

    R = _reach(f) / eps
    scale = eps ** d
    if isinstance(src, IntegerPointSet) and f.kind != "combo":
        code, fp = f.kernel_spec()
        b = int(math.floor(R))
        value, _ = _backend.integer_sum(
            d, src.set_code, code, fp, eps, 0.0, scale,
            [-b] * d, [b] * d, R * R, twist=src._twist_int)
        return value
    pts, w = src.enumerate(R)
    if len(pts) == 0:
        return 0j
    terms = scale * f(eps * np.asarray(pts, dtype=float)) * w
    return complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist()))


def partition_riemann_sum(f: TestFunction, cell_size: float,
                          sample_mode: str = "center") -> float:
    """Classical Riemann sum over the cubical grid of side ``cell_size``.

    Cubes are ``cell*[i, i+1)`` per axis; the sample point is the lower
    corner (``corner``) or the midpoint (``center``).
    """
    if not cell_size > 0:
        raise ValueError("cell_size must be > 0")
    offset = {"corner": 0.0, "center": 0.5}[sample_mode]
    d = f.dimension
    if f.support_radius <= 0:
        return 0.0
    lo = [math.floor((c - f.support_radius) / cell_size) - 1 for c in f.center]
    hi = [math.ceil((c + f.support_radius) / cell_size) + 1 for c in f.center]
    scale = cell_size ** d
    if f.kind == "combo":
        return math.fsum(float(c) * partition_riemann_sum(g, cell_size, sample_mode)
                         for c, g in f.params)
    code, fp = f.kernel_spec()
    value, _ = _backend.integer_sum(d, SET_ALL, code, fp, cell_size, offset,
                                    scale, lo, hi, -1.0)
    return value.real


def integral(f: TestFunction, atol: float = 1e-8, max_cells: float = 5e7) -> float:
    """``int f``: the exact value when known, else refined partition sums.

    The midpoint partition sum is halved in cell size until two successive
    values agree to ``atol`` (or the grid would exceed ``max_cells``).
    """
    if f.exact_integral is not None:
        return float(f.exact_integral)
    if f.support_radius <= 0:
        return 0.0
    d = f.dimension
    cell = f.support_radius / 8
    prev = partition_riemann_sum(f, cell, "center")
    while True:
        cell /= 2
        if (2 * f.support_radius / cell) ** d > max_cells:
            return prev
        cur = partition_riemann_sum(f, cell, "center")
        if abs(cur - prev) <= atol:
            return cur
        prev = cur


# ---------------------------------------------------------------------------
# densities

@dataclass(frozen=True)
class DensityEstimate:
    epsilons: tuple
    scaled_sums: tuple
    integral: float
    density_samples: tuple
    extrapolated: complex
    error_estimate: float

    def as_dict(self):
        return {
            "epsilons": list(self.epsilons),
            "scaled_sums": [complex(s) for s in self.scaled_sums],
            "integral": self.integral,
            "density_samples": [complex(s) for s in self.density_samples],
            "extrapolated": complex(self.extrapolated),
            "error_estimate": self.error_estimate,
        }


def default_schedule(eps_min: float = 2.0 ** -12, eps_max: float = 2.0 ** -4):
    """Halving schedule from ``eps_max`` down to ``eps_min`` (appended if off-grid)."""
    out, e = [], eps_max
    while e > eps_min * (1 + 1e-12):
        out.append(e)
        e /= 2
    out.append(eps_min)
    return out


def fit_intercept(eps, samples):
    """Intercept of the least-squares line through the last three points."""
    x = np.asarray(eps[-3:], dtype=float)
    y = np.asarray(samples[-3:], dtype=complex)
    if len(x) == 1:
        return complex(y[0])
    A = np.vstack([np.ones_like(x), x]).T
    re = np.linalg.lstsq(A, y.real, rcond=None)[0][0]
    im = np.linalg.lstsq(A, y.imag, rcond=None)[0][0]
    return complex(re, im)


def estimate_density(f: TestFunction, src: WeightedPointSource,
                     eps_schedule: Sequence[float] | None = None) -> DensityEstimate:
    """Scaled Riemann sums along ``eps_schedule`` and their eps -> 0 limit / int f."""
    eps_schedule = list(default_schedule() if eps_schedule is None else eps_schedule)
    if not eps_schedule or any(e <= 0 for e in eps_schedule):
        raise ValueError("schedule must be non-empty and positive")
    if any(b >= a for a, b in zip(eps_schedule, eps_schedule[1:])):
        raise ValueError("schedule must be strictly decreasing")
    integ = integral(f)
    if integ == 0:
        raise ValueError("test function has zero integral")
    sums = [riemann_sum(f, src, e) for e in eps_schedule]
    samples = [s / integ for s in sums]
    extra = fit_intercept(eps_schedule, samples)
    err = max(abs(s - extra) for s in samples[-2:])
    return DensityEstimate(tuple(eps_schedule), tuple(sums), integ,
                           tuple(samples), extra, float(err))


# ---------------------------------------------------------------------------
# Delone diagnostics

@dataclass(frozen=True)
class DeloneReport:
    R_candidate: float
    r_candidate: float
    relatively_dense: bool
    uniformly_discrete: bool
    test_region: tuple


def delone_check(src: WeightedPointSource, R: float, r: float, region) -> DeloneReport:
    """Empirical Delone test on a bounded box ``region = ((lo...), (hi...))``.

    Relative density: every ball ``B_R(x)`` with ``x`` on a grid of pitch
    ``R/4`` in the region meets the set. Uniform discreteness: no two points
    in the region are within ``2r`` of each other.
    """
    if not (R > 0 and r > 0):
        raise ValueError("R and r must be > 0")
    lo, hi = (np.asarray(v, dtype=float) for v in region)
    reach = float(np.max(np.linalg.norm(np.vstack([lo, hi]), axis=1))) + R
    pts, _ = src.enumerate(reach)
    pts = np.asarray(pts, dtype=float)
    if len(pts) == 0:
        return DeloneReport(R, r, False, True, (tuple(lo), tuple(hi)))
    tree = cKDTree(pts)
    axes = [np.arange(a, b + R / 8, R / 4) for a, b in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, len(lo))
    dist, _ = tree.query(grid)
    dense = bool(np.all(dist <= R))
    inside = np.all((pts >= lo) & (pts <= hi), axis=1)
    sub = cKDTree(pts[inside])
    discrete = len(sub.query_pairs(2 * r)) == 0
    return DeloneReport(R, r, dense, discrete, (tuple(lo), tuple(hi)))


def delone_density_bounds(src: WeightedPointSource, region, max_side: int = 16):
    """Constants ``(c1, c2)`` from two cubical partitions of the region.

    ``c1 = side1^-d`` for the smallest integer side whose grid cells (inside
    the region) each hold at least one point; ``c2 = side2^-d`` for the
    largest side ``1/k`` whose cells each hold at most one point.
    """
    lo, hi = (np.asarray(v, dtype=float) for v in region)
    d = len(lo)
    reach = float(np.max(np.linalg.norm(np.vstack([lo, hi]), axis=1)))
    pts, _ = src.enumerate(reach)
    pts = np.asarray(pts, dtype=float)
    pts = pts[np.all((pts >= lo) & (pts < hi), axis=1)]

    def cell_counts(side):
        idx = np.floor((pts - lo) / side).astype(np.int64)
        shape = np.floor((hi - lo) / side).astype(np.int64)
        ok = np.all(idx < shape, axis=1)
        flat = np.ravel_multi_index(idx[ok].T, shape)
        return np.bincount(flat, minlength=int(np.prod(shape)))

    side1 = next((s for s in range(1, max_side + 1) if cell_counts(s).min() >= 1), None)
    side2 = next((1.0 / k for k in range(1, 64) if cell_counts(1.0 / k).max() <= 1), None)
    if side1 is None or side2 is None:
        raise ValueError("no admissible partition found in the region")
    return side1 ** -d, side2 ** -d
