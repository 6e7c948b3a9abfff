"""Lattices, Poisson summation, cut-and-project model sets and the primitive-point expansion.

Fourier convention throughout: ``f_hat(xi) = int f(x) exp(-2 pi i <x, xi>) dx``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy import special
from scipy.spatial import cKDTree

from .arith import mobius, mobius_sieve, zeta
from .core import (DensityEstimate, ExplicitPointSource, IntegerPointSet,
                   TestFunction, WeightedPointSource, estimate_density, riemann_sum)

__all__ = [
    "Lattice", "dual_lattice", "GaussianFunction", "poisson_check",
    "CutProjectScheme", "fibonacci_scheme", "ModelSet", "model_set",
    "SpectrumEntry", "qc_spectrum", "spectral_sum", "write_spectrum_csv",
    "bump_fourier_transform", "bump_fourier_transform_tensor",
    "generalized_poisson_check", "n_of_xi", "PrimExpansion", "prim_expansion",
    "prim_coefficient", "prim_coefficient_limit", "prim_poisson_check",
    "twisted_density_check",
]

_COND_MAX = 1e12


# ---------------------------------------------------------------------------
# lattices

def _box_lattice_points(B, lo, hi, chunk=1 << 18):
    """Integer ``z`` with ``B z`` in the box ``[lo, hi]`` (padded superset).

    The first N-1 coordinates are scanned over their bounding box; the last
    one is solved for as an interval per prefix. Callers apply the exact test.
    """
    B = np.asarray(B, dtype=float)
    N = B.shape[0]
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    Binv = np.linalg.inv(B)
    zmin = np.floor(np.minimum(Binv * lo, Binv * hi).sum(axis=1)).astype(np.int64) - 1
    zmax = np.ceil(np.maximum(Binv * lo, Binv * hi).sum(axis=1)).astype(np.int64) + 1
    if N == 1:
        z = np.arange(zmin[0], zmax[0] + 1, dtype=np.int64)[:, None]
        return z
    axes = [np.arange(a, b + 1, dtype=np.int64) for a, b in zip(zmin[:-1], zmax[:-1])]
    col = B[:, -1]
    out = []
    inner = int(np.prod([len(a) for a in axes[1:]])) if N > 2 else 1
    step = max(1, chunk // max(inner, 1))
    for start in range(0, len(axes[0]), step):
        sub = [axes[0][start:start + step]] + axes[1:]
        P = np.stack(np.meshgrid(*sub, indexing="ij"), -1).reshape(-1, N - 1)
        s = P @ B[:, :-1].T
        L = np.full(len(P), -np.inf)
        U = np.full(len(P), np.inf)
        ok = np.ones(len(P), dtype=bool)
        for j in range(N):
            if abs(col[j]) > 1e-300:
                t1 = (lo[j] - s[:, j]) / col[j]
                t2 = (hi[j] - s[:, j]) / col[j]
                L = np.maximum(L, np.minimum(t1, t2))
                U = np.minimum(U, np.maximum(t1, t2))
            else:
                pad = 1e-9 * (1 + abs(lo[j]) + abs(hi[j]))
                ok &= (s[:, j] >= lo[j] - pad) & (s[:, j] <= hi[j] + pad)
        kmin = np.ceil(L - 1e-9)
        kmax = np.floor(U + 1e-9)
        counts = np.where(ok & (kmax >= kmin), kmax - kmin + 1, 0).astype(np.int64)
        total = int(counts.sum())
        if total == 0:
            continue
        rep = np.repeat(np.arange(len(P)), counts)
        first = np.cumsum(counts) - counts
        last = kmin[rep].astype(np.int64) + (np.arange(total) - first[rep])
        out.append(np.column_stack([P[rep], last]))
    if not out:
        return np.zeros((0, N), dtype=np.int64)
    return np.concatenate(out)


@dataclass(frozen=True, eq=False)
class Lattice:
    """Lattice ``B Z^d``; the columns of ``basis`` generate it."""

    basis: np.ndarray

    def __post_init__(self):
        B = np.array(self.basis, dtype=float)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise ValueError("basis must be a square matrix")
        if np.linalg.cond(B) > _COND_MAX:
            raise ValueError("basis is singular or near-singular (condition > 1e12)")
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    @classmethod
    def integer(cls, d: int) -> "Lattice":
        return cls(np.eye(d))

    @property
    def dimension(self) -> int:
        return self.basis.shape[0]

    @property
    def covolume(self) -> float:
        return abs(float(np.linalg.det(self.basis)))

    def gram(self) -> np.ndarray:
        return self.basis.T @ self.basis

    def points(self, R: float, center=None):
        """``(coords, vectors)`` of lattice points with ``|v - center| <= R``."""
        d = self.dimension
        c = np.zeros(d) if center is None else np.asarray(center, dtype=float)
        z = _box_lattice_points(self.basis, c - R, c + R)
        v = z @ self.basis.T
        keep = np.einsum("ij,ij->i", v - c, v - c) <= R * R
        return z[keep], v[keep]


def dual_lattice(L: Lattice) -> Lattice:
    """``L* = {eta : <eta, z> in Z for z in L}``, basis ``B^-T``."""
    return Lattice(np.linalg.inv(L.basis).T)


# ---------------------------------------------------------------------------
# classical Poisson summation

@dataclass(frozen=True)
class GaussianFunction:
    """``exp(-pi t |x|^2)`` on R^d, with ``f_hat(xi) = t^(-d/2) exp(-pi |xi|^2 / t)``."""

    dimension: int
    t: float = 1.0

    def __call__(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.exp(-np.pi * self.t * np.einsum("ij,ij->i", x, x))

    def ft(self, xi):
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        return self.t ** (-self.dimension / 2) * np.exp(
            -np.pi * np.einsum("ij,ij->i", xi, xi) / self.t)


def _fsum_complex(z):
    z = np.asarray(z, dtype=complex)
    return complex(math.fsum(z.real.tolist()), math.fsum(z.imag.tolist()))


def poisson_check(f: GaussianFunction, L: Lattice, eta=None,
                  R_direct: float | None = None, R_dual: float | None = None):
    """Both sides of twisted Poisson summation on ``L``.

    ``sum_{z in L} f(z) e^{2 pi i <z, eta>}`` against
    ``covol^-1 sum_{xi in L*} f_hat(xi - eta)``. Default radii put the
    Gaussian tails below ``e^-37`` (about 1e-16).
    """
    d = L.dimension
    if f.dimension != d:
        raise ValueError("dimension mismatch")
    eta = np.zeros(d) if eta is None else np.array([float(Fraction(v)) for v in eta])
    if R_direct is None:
        R_direct = math.sqrt(37 / (math.pi * f.t))
    if R_dual is None:
        R_dual = math.sqrt(37 * f.t / math.pi)
    _, v = L.points(R_direct)
    lhs = _fsum_complex(f(v) * np.exp(2j * np.pi * (v @ eta)))
    _, w = dual_lattice(L).points(R_dual, center=eta)
    rhs = _fsum_complex(f.ft(w - eta)) / L.covolume
    return {"lhs": lhs, "rhs": rhs, "abs_err": abs(lhs - rhs)}


# ---------------------------------------------------------------------------
# Fourier transform of the smooth bump

_GL_X, _GL_W = np.polynomial.legendre.leggauss(64)
_CHEB_NODES = 28
_CONTOUR_DEPTH = 0.5


def _graded_rule(levels=24, uniform=6):
    """Composite 64-point Gauss-Legendre on [0, 1], geometrically graded toward 1."""
    e = np.r_[np.linspace(0.0, 0.5, uniform + 1), 1 - 2.0 ** -np.arange(2, levels + 1), 1.0]
    half = (e[1:] - e[:-1])[:, None] / 2
    x = ((e[:-1, None] + e[1:, None]) / 2 + half * _GL_X).ravel()
    return x, (half * _GL_W).ravel()


def _sphere_area(k):
    """Surface area of the unit sphere S^k (2 for S^0)."""
    return 2 * math.pi ** ((k + 1) / 2) / math.gamma((k + 1) / 2)


def _bump_profile(d, u):
    """Integral of the unit bump over the hyperplane ``x_1 = u`` (complex ``u`` allowed).

    With ``a^2 = 1 - u^2`` this is
    ``|S^(d-2)| a^(d-1) int_0^1 exp(-1/(a^2 (1 - v^2))) v^(d-2) dv``.
    """
    a2 = 1 - u * u
    if d == 1:
        return np.exp(-1 / a2)
    v, wv = _graded_rule()
    inner = np.exp(-1 / (a2[:, None] * (1 - v * v)[None, :])) * (v ** (d - 2))[None, :]
    return _sphere_area(d - 2) * np.sqrt(a2) ** (d - 1) * (inner @ wv)


@lru_cache(maxsize=None)
def _contour_rule(d):
    """Nodes and weights for ``B_d(s) = Re sum_k W_k exp(-2 pi i s u_k)``.

    ``B_d(s) = int_{-1}^{1} P_d(u) e^{-2 pi i s u} du`` with ``P_d`` the
    hyperplane profile. The path ``u = t - i h (1 - t^2)`` (h = 1/2) leaves
    the real axis at 45 degrees, through the endpoint saddle points, so the
    integrand carries no cancellation and large-``s`` values keep their
    relative accuracy.
    """
    t, wt = _graded_rule()
    t, wt = np.r_[-t[::-1], t], np.r_[wt[::-1], wt]
    u = t - 1j * _CONTOUR_DEPTH * (1 - t * t)
    du = 1 + 2j * _CONTOUR_DEPTH * t
    return u, _bump_profile(d, u) * du * wt


def _unit_bump_transform(d, s):
    """Transform of ``exp(-1/(1 - |x|^2))`` on R^d at radii ``s`` (direct quadrature)."""
    u, W = _contour_rule(d)
    s = np.atleast_1d(np.asarray(s, dtype=float))
    return (np.exp(-2j * np.pi * np.outer(s, u)) @ W).real


class _BumpTable:
    """Chebyshev interpolant of the unit-bump transform on unit panels in ``s``.

    The transform is entire of exponential type 2 pi, so 28 nodes per unit
    panel reach rounding level. Panels are filled lazily.
    """

    def __init__(self, d):
        self.d = d
        self.coef = np.zeros((0, _CHEB_NODES))  # row k: coefficients on [k, k+1]
        self._nodes = np.cos(np.pi * (np.arange(_CHEB_NODES) + 0.5) / _CHEB_NODES)

    def _extend(self, kmax):
        k0 = len(self.coef)
        if kmax < k0:
            return
        ks = np.arange(k0, kmax + 1)
        s = (ks[:, None] + (self._nodes + 1) / 2).ravel()
        vals = _unit_bump_transform(self.d, s).reshape(len(ks), _CHEB_NODES)
        new = np.polynomial.chebyshev.chebfit(self._nodes, vals.T, _CHEB_NODES - 1).T
        self.coef = np.vstack([self.coef, new])

    def __call__(self, s):
        s = np.abs(np.asarray(s, dtype=float))
        if s.size == 0:
            return np.zeros(s.shape)
        k = np.floor(s).astype(np.int64)
        self._extend(int(k.max()))
        # Clenshaw recurrence, vectorized over points with per-point coefficients
        x = 2 * (s - k) - 1
        c = self.coef[k]
        b1 = np.zeros(s.shape)
        b2 = np.zeros(s.shape)
        for j in range(_CHEB_NODES - 1, 0, -1):
            b1, b2 = c[..., j] + 2 * x * b1 - b2, b1
        return c[..., 0] + x * b1 - b2


@lru_cache(maxsize=None)
def _bump_table(d):
    return _BumpTable(d)


def bump_fourier_transform(f: TestFunction, xi) -> np.ndarray:
    """``f_hat(xi)`` for a smooth bump, from the radial (Hankel) form.

    ``f_hat(xi) = r^d B_d(r |xi|) exp(-2 pi i <c, xi>)`` with ``B_d`` the
    transform of the unit bump, tabulated to rounding accuracy.
    """
    if f.kind != "bump":
        raise ValueError("bump_fourier_transform needs a smooth bump")
    c, r = f.params
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    rho = np.linalg.norm(xi, axis=1)
    val = r ** f.dimension * _bump_table(f.dimension)(r * rho)
    if any(c):
        return val * np.exp(-2j * np.pi * (xi @ np.asarray(c)))
    return val.astype(complex)


def bump_fourier_transform_tensor(f: TestFunction, xi, nodes: int = 64, panels: int = 16):
    """Independent tensor-product Gauss-Legendre evaluation of ``f_hat`` (d <= 2)."""
    c, r = f.params
    d = f.dimension
    edges = np.linspace(-r, r, panels + 1)
    gx, gw = np.polynomial.legendre.leggauss(nodes)
    half = (edges[1:] - edges[:-1])[:, None] / 2
    x = ((edges[:-1, None] + edges[1:, None]) / 2 + half * gx).ravel()
    w = (half * gw).ravel()
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    if d == 1:
        phi = np.exp(-1.0 / np.maximum(1.0 - (x / r) ** 2, 1e-300)) * (np.abs(x) < r)
        E = np.exp(-2j * np.pi * np.outer(xi[:, 0], x))
        out = E @ (w * phi)
    elif d == 2:
        t = (x[:, None] ** 2 + x[None, :] ** 2) / r ** 2
        phi = np.where(t < 1, np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
        Phi = w[:, None] * phi * w[None, :]
        E1 = np.exp(-2j * np.pi * np.outer(xi[:, 0], x))
        E2 = np.exp(-2j * np.pi * np.outer(xi[:, 1], x))
        out = np.einsum("ki,ij,kj->k", E1, Phi, E2)
    else:
        raise ValueError("tensor oracle implemented for d <= 2")
    return out * np.exp(-2j * np.pi * (xi @ np.asarray(c)))


# ---------------------------------------------------------------------------
# cut-and-project schemes

@dataclass
class CutProjectScheme:
    """Lattice ``L = basis Z^N`` in ``R^d x R^(N-d)`` with a box window.

    The first ``physical_dim`` coordinates are physical, the rest internal.
    ``window`` holds per-axis ``[lo, hi]``; with ``upper_open`` the window
    is ``[lo, hi)`` on every axis.
    """

    total_dim: int
    physical_dim: int
    basis: np.ndarray
    window: np.ndarray
    upper_open: bool = False
    density_warning: Optional[str] = field(default=None, init=False)

    def __post_init__(self):
        self.basis = np.asarray(self.basis, dtype=float)
        self.window = np.atleast_2d(np.asarray(self.window, dtype=float))
        N, d = self.total_dim, self.physical_dim
        if not 0 < d < N:
            raise ValueError("need 0 < physical_dim < total_dim")
        if self.basis.shape != (N, N):
            raise ValueError(f"basis must be {N}x{N}")
        if self.window.shape != (N - d, 2) or np.any(self.window[:, 0] > self.window[:, 1]):
            raise ValueError(f"window must be {N - d} intervals [lo, hi] with lo <= hi")
        self.lattice = Lattice(self.basis)
        self.density_warning = self._check_density()

    @property
    def window_volume(self) -> float:
        return float(np.prod(self.window[:, 1] - self.window[:, 0]))

    @property
    def density(self) -> float:
        return self.window_volume / self.lattice.covolume

    def _check_density(self, search=64.0):
        """Flag a nonzero ``(0, eta') in L*``: then ``p_int(L)`` is not dense."""
        d = self.physical_dim
        Bs = dual_lattice(self.lattice).basis
        tol = 1e-9
        lo = np.r_[np.full(d, -tol), np.full(self.total_dim - d, -search)]
        hi = np.r_[np.full(d, tol), np.full(self.total_dim - d, search)]
        z = _box_lattice_points(Bs, lo, hi)
        v = z @ Bs.T
        hit = np.all(np.abs(v[:, :d]) <= tol, axis=1) & np.any(z != 0, axis=1)
        if np.any(hit):
            eta = v[hit][0, d:]
            return (f"internal projection of the lattice is not dense: "
                    f"(0, {eta.tolist()}) lies in the dual lattice")
        return None

    def in_window(self, y, closed=False):
        lo, hi = self.window[:, 0], self.window[:, 1]
        if self.upper_open and not closed:
            return np.all((y >= lo) & (y < hi), axis=1)
        return np.all((y >= lo) & (y <= hi), axis=1)

    def strip_points(self, R: float, window=None, closed=False):
        """Lattice points with physical norm <= R and internal part in the window.

        Returns ``(coords, physical, internal)``; ``window`` overrides the
        scheme window (closed).
        """
        d = self.physical_dim
        W = self.window if window is None else np.atleast_2d(window)
        lo = np.r_[np.full(d, -R), W[:, 0]]
        hi = np.r_[np.full(d, R), W[:, 1]]
        z = _box_lattice_points(self.basis, lo, hi)
        v = z @ self.basis.T
        x, y = v[:, :d], v[:, d:]
        keep = np.einsum("ij,ij->i", x, x) <= R * R
        if window is None:
            keep &= self.in_window(y, closed)
        else:
            keep &= np.all((y >= W[:, 0]) & (y <= W[:, 1]), axis=1)
        return z[keep], x[keep], y[keep]

    # JSON layout: total_dim, physical_dim, basis (row-major), window [[lo, hi], ...]
    def to_dict(self):
        return {
            "total_dim": self.total_dim,
            "physical_dim": self.physical_dim,
            "basis": self.basis.tolist(),
            "window": self.window.tolist(),
            "upper_open": self.upper_open,
        }

    def to_json(self, path=None):
        text = json.dumps(self.to_dict(), indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - {"total_dim", "physical_dim", "basis", "window", "upper_open"}
        if unknown:
            raise ValueError(f"unknown scheme keys: {sorted(unknown)}")
        missing = {"total_dim", "physical_dim", "basis", "window"} - set(data)
        if missing:
            raise ValueError(f"missing scheme keys: {sorted(missing)}")
        return cls(int(data["total_dim"]), int(data["physical_dim"]),
                   np.array(data["basis"], dtype=float), np.array(data["window"], dtype=float),
                   bool(data.get("upper_open", False)))

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def fibonacci_scheme() -> CutProjectScheme:
    """Z^2 rotated so the physical line has slope 1/tau in lattice coordinates.

    Basis columns ``(cos t, -sin t)`` and ``(sin t, cos t)`` with
    ``tan t = 1/tau``; the window is the internal projection of the unit
    cell, ``[-sin t, cos t)``. It is half-open so the boundary point
    ``(0, 1)`` does not create a third gap length.
    """
    tau = (1 + math.sqrt(5)) / 2
    t = math.atan(1 / tau)
    c, s = math.cos(t), math.sin(t)
    basis = np.array([[c, s], [-s, c]])
    return CutProjectScheme(2, 1, basis, np.array([[-s, c]]), upper_open=True)


class ModelSet(WeightedPointSource):
    """The model set of a scheme as a weighted point source (weights 1)."""

    def __init__(self, scheme: CutProjectScheme):
        self.scheme = scheme
        self.dimension = scheme.physical_dim
        self.descriptor = f"model set N={scheme.total_dim}, d={scheme.physical_dim}"

    def enumerate(self, R: float):
        z, x, _ = self.scheme.strip_points(float(R))
        _check_injective(z, x)
        order = np.lexsort(x.T[::-1]) if len(x) else np.arange(0)
        return x[order], np.ones(len(x), dtype=complex)


def _check_injective(z, x, tol=1e-9):
    if len(x) < 2:
        return
    pairs = cKDTree(x).query_pairs(tol, output_type="ndarray")
    if len(pairs):
        i, j = pairs[0]
        raise ValueError(f"physical projection is not injective: lattice points "
                         f"{z[i].tolist()} and {z[j].tolist()} both map to {x[i].tolist()}")


def model_set(scheme: CutProjectScheme, R: float) -> ExplicitPointSource:
    """Points of the model set with physical norm <= R."""
    if R < 0:
        raise ValueError("R must be >= 0")
    pts, w = ModelSet(scheme).enumerate(R)
    return ExplicitPointSource(pts, w, descriptor=f"model set R={R}")


# ---------------------------------------------------------------------------
# diffraction coefficients

@dataclass(frozen=True)
class SpectrumEntry:
    xi: tuple
    xi_internal: tuple
    amplitude: complex
    n_xi: Optional[int] = None


def _interval_ft(lo, hi, s):
    """``chi_[lo,hi]^(s) = exp(-2 pi i c s) sin(pi w s)/(pi s)``, value w at 0."""
    w, c = hi - lo, (hi + lo) / 2
    return w * np.sinc(w * s) * np.exp(-2j * np.pi * c * s)


def _window_ft(window, y):
    out = np.ones(len(y), dtype=complex)
    for j, (lo, hi) in enumerate(window):
        out *= _interval_ft(lo, hi, y[:, j])
    return out


def _sort_spectrum(xi):
    keys = [xi[:, j] for j in range(xi.shape[1] - 1, -1, -1)]
    return np.lexsort(keys + [np.round(np.linalg.norm(xi, axis=1), 12)])


def qc_spectrum(scheme: CutProjectScheme, xi_cutoff: float, amp_floor: float):
    """Bragg positions ``xi = p_d(beta)``, ``beta in L*``, with ``|xi| <= xi_cutoff``
    and ``|a(xi)| >= amp_floor``; ``a(xi) = covol^-1 chi_W^(xi')``.

    Entries are sorted by ``|xi|`` then lexicographically. Positions where
    the amplitude vanishes (zeros of the sinc) fall below any positive
    floor and are dropped.
    """
    if not (xi_cutoff > 0 and amp_floor > 0):
        raise ValueError("cutoffs must be positive")
    d, N = scheme.physical_dim, scheme.total_dim
    covol = scheme.lattice.covolume
    widths = scheme.window[:, 1] - scheme.window[:, 0]
    # |a| <= covol^-1 prod_j min(w_j, 1/(pi |xi'_j|))
    Y = np.array([np.prod(np.delete(widths, j)) / (math.pi * amp_floor * covol)
                  for j in range(N - d)])
    Bs = dual_lattice(scheme.lattice).basis
    lo = np.r_[np.full(d, -xi_cutoff), -Y]
    hi = np.r_[np.full(d, xi_cutoff), Y]
    z = _box_lattice_points(Bs, lo, hi)
    v = z @ Bs.T
    xi, yi = v[:, :d], v[:, d:]
    keep = np.einsum("ij,ij->i", xi, xi) <= xi_cutoff ** 2
    xi, yi = xi[keep], yi[keep]
    a = _window_ft(scheme.window, yi) / covol
    keep = np.abs(a) >= amp_floor
    xi, yi, a = xi[keep], yi[keep], a[keep]
    order = _sort_spectrum(xi)
    return [SpectrumEntry(tuple(xi[k].tolist()), tuple(yi[k].tolist()), complex(a[k]))
            for k in order]


def spectral_sum(spectrum, f: TestFunction) -> complex:
    """``sum a(xi) f_hat(xi)`` over a spectrum list."""
    if not spectrum:
        return 0j
    xi = np.array([e.xi for e in spectrum])
    a = np.array([e.amplitude for e in spectrum])
    return _fsum_complex(a * bump_fourier_transform(f, xi))


def write_spectrum_csv(entries, fh=None) -> str:
    """CSV with columns ``xi_1..xi_d, re_a, im_a, n_xi`` (n_xi blank when undefined)."""
    buf = io.StringIO()
    d = len(entries[0].xi) if entries else 1
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"xi_{i + 1}" for i in range(d)] + ["re_a", "im_a", "n_xi"])
    for e in entries:
        w.writerow([f"{v:.12g}" for v in e.xi]
                   + [f"{e.amplitude.real:.12g}", f"{e.amplitude.imag:.12g}",
                      "" if e.n_xi is None else str(e.n_xi)])
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text


def _unit_bump_mass(d=1):
    return _bump_table(d)(np.zeros(1))[0]


def generalized_poisson_check(scheme: CutProjectScheme, f: TestFunction,
                              smoothing_N: int, xi_cutoff: float, tail_tol: float = 1e-13):
    """Poisson summation for a model set with the window smoothed to ``g_N``.

    ``g_N = chi_{W + delta} * phi_delta`` per axis with ``delta = 1/(2N)``
    and ``phi_delta`` the normalized bump of radius delta: it equals 1 on W
    and vanishes outside the ``1/N``-neighbourhood. Then
    ``sum_{z in L} f(p z) g_N(p' z) = covol^-1 sum_{L*} f_hat(xi) g_N^(xi')``.
    The left side equals the model-set sum over the closed window when no
    lattice point over supp f has its internal part in the collar; this is
    verified and a ``ValueError`` raised otherwise.
    """
    if smoothing_N < 1:
        raise ValueError("smoothing_N must be >= 1")
    if f.dimension != scheme.physical_dim:
        raise ValueError("dimension mismatch")
    if f.support_radius <= 0:
        return {"lhs": 0.0, "rhs": 0.0, "abs_err": 0.0, "terms": 0}
    if f.kind != "bump":
        raise ValueError("generalized_poisson_check needs a smooth bump")
    d, N = scheme.physical_dim, scheme.total_dim
    c, r = f.params
    reach = math.sqrt(sum(v * v for v in c)) + r
    delta = 1.0 / (2 * smoothing_N)
    W = scheme.window
    outer = np.column_stack([W[:, 0] - 2 * delta, W[:, 1] + 2 * delta])
    z, x, y = scheme.strip_points(reach, window=outer)
    inside = np.all((y >= W[:, 0]) & (y <= W[:, 1]), axis=1)
    fx = f(x)
    collar = (~inside) & (fx != 0)
    if np.any(collar):
        k = int(np.flatnonzero(collar)[0])
        raise ValueError(f"lattice point {z[k].tolist()} lies in the smoothing collar; "
                         f"increase smoothing_N")
    lhs = math.fsum(fx[inside].tolist())

    # internal cutoff: |phi_hat(delta s)| below tail_tol relative to its mass
    table = _bump_table(1)
    mass = _unit_bump_mass(1)
    s_max = 1.0
    while abs(table(np.array([s_max]))[0]) / mass > tail_tol or s_max < 4:
        s_max += 1.0
    Y = s_max / delta
    Bs = dual_lattice(scheme.lattice).basis
    lo = np.r_[np.full(d, -xi_cutoff), np.full(N - d, -Y)]
    hi = np.r_[np.full(d, xi_cutoff), np.full(N - d, Y)]
    zz = _box_lattice_points(Bs, lo, hi)
    v = zz @ Bs.T
    xi, yi = v[:, :d], v[:, d:]
    keep = (np.einsum("ij,ij->i", xi, xi) <= xi_cutoff ** 2) & np.all(np.abs(yi) <= Y, axis=1)
    xi, yi = xi[keep], yi[keep]
    g_hat = np.ones(len(yi), dtype=complex)
    for j, (a, b) in enumerate(W):
        g_hat *= _interval_ft(a - delta, b + delta, yi[:, j])
        g_hat *= table(delta * yi[:, j]) / mass
    terms = bump_fourier_transform(f, xi) * g_hat / scheme.lattice.covolume
    rhs = _fsum_complex(terms)
    return {"lhs": lhs, "rhs": rhs.real, "rhs_imag": rhs.imag,
            "abs_err": abs(lhs - rhs), "terms": int(len(terms)),
            "boundary_points": int(np.count_nonzero(inside & ~scheme.in_window(y)))}


# ---------------------------------------------------------------------------
# the primitive-point expansion

def n_of_xi(xi) -> int:
    """``lcm`` of the reduced denominators of a rational point."""
    return math.lcm(*(Fraction(v).denominator for v in xi)) if len(xi) else 1


def _prime_factors(n):
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def prim_coefficient(n: int, d: int, N: int) -> float:
    """``a_N(xi)`` for ``n(xi) = n``: ``mu(n)/n^d sum_{l <= N/n, (l, n) = 1} mu(l)/l^d``."""
    mn = mobius(n)
    if mn == 0 or n > N:
        return 0.0
    terms = [mobius(l) / l ** d for l in range(1, N // n + 1) if math.gcd(l, n) == 1]
    return mn / n ** d * math.fsum(terms)


def prim_coefficient_limit(n: int, d: int) -> float:
    """``a(xi) = mu(n)/n^d zeta(d)^-1 prod_{p | n} (1 - p^-d)^-1``."""
    mn = mobius(n)
    if mn == 0:
        return 0.0
    prod = math.prod(1.0 / (1.0 - p ** -d) for p in _prime_factors(n))
    return mn / n ** d / zeta(d) * prod


@dataclass
class PrimExpansion:
    """Truncated expansion ``sum_{xi in Lambda_N} a_N(xi) delta_xi``.

    Arrays are aligned: ``numerators[k] / n_xi[k]`` is the point ``xi[k]``.
    """

    d: int
    N: int
    xi_cutoff: float
    mertens: int
    numerators: np.ndarray
    n_xi: np.ndarray
    xi: np.ndarray
    a_N: np.ndarray
    a_limit: np.ndarray

    def __len__(self):
        return len(self.n_xi)

    @property
    def entries(self):
        return [{"xi": tuple(Fraction(int(b), int(n)) for b in row), "n_xi": int(n),
                 "a_N": float(a), "a_limit": float(al)}
                for row, n, a, al in zip(self.numerators, self.n_xi, self.a_N, self.a_limit)]

    def spectrum(self):
        return [SpectrumEntry(tuple(x.tolist()), (), complex(a), int(n))
                for x, a, n in zip(self.xi, self.a_N, self.n_xi)]


def _lambda_points(d, N, R_lo, R_hi):
    """Points of Lambda_N with ``R_lo < |xi| <= R_hi`` as (numerators, n)."""
    mu = mobius_sieve(N)
    nums, dens = [], []
    for n in range(1, N + 1):
        if mu[n] == 0:
            continue
        src = IntegerPointSet(d, "all")
        b, _ = src.enumerate(R_hi * n)
        if R_lo >= 0:
            b = b[np.einsum("ij,ij->i", b, b) > (R_lo * n) ** 2]
        if n > 1:
            b = b[np.gcd.reduce(np.column_stack([b, np.full(len(b), n)]), axis=1) == 1]
        nums.append(b)
        dens.append(np.full(len(b), n, dtype=np.int64))
    return np.concatenate(nums), np.concatenate(dens)


def prim_expansion(d: int, N: int, xi_cutoff: float, max_points: float = 2e7) -> PrimExpansion:
    """``Lambda_N`` truncated to ``|xi| <= xi_cutoff`` with ``a_N`` and its limit.

    Raises ``ValueError`` when the truncated set would exceed ``max_points``
    (it grows like ``xi_cutoff^d N^(d+1)``).
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    if N < 1:
        raise ValueError("N must be >= 1")
    ball = math.pi ** (d / 2) / math.gamma(d / 2 + 1)
    approx = sum(ball * (xi_cutoff * n) ** d for n in range(1, N + 1) if mobius(n))
    if approx > max_points:
        raise ValueError(f"about {approx:.3g} points in the truncated expansion "
                         f"(limit {max_points:.3g}); lower N or xi_cutoff")
    b, n = _lambda_points(d, N, -1.0, xi_cutoff)
    coef = {k: prim_coefficient(k, d, N) for k in np.unique(n).tolist()}
    lim = {k: prim_coefficient_limit(k, d) for k in coef}
    xi = b / n[:, None]
    order = _sort_spectrum(xi) if len(xi) else np.arange(0)
    b, n, xi = b[order], n[order], xi[order]
    return PrimExpansion(d, N, float(xi_cutoff), mobius_sieve(N).mertens(), b, n, xi,
                         np.array([coef[k] for k in n.tolist()]),
                         np.array([lim[k] for k in n.tolist()]))


def prim_poisson_check(d: int, f: TestFunction, N: int, xi_cutoff: float):
    """``sum_{Z^d_prim} f`` against ``sum_{Lambda_N} a_N f_hat - M(N) f(0)``.

    The spectral side is truncated at ``|xi| <= xi_cutoff``; ``tail_estimate``
    is the magnitude of the next unit shell of terms.
    """
    if f.kind != "bump":
        raise ValueError("prim_poisson_check needs a smooth bump")
    if f.dimension != d:
        raise ValueError("dimension mismatch")
    c, r = f.params
    if math.sqrt(sum(v * v for v in c)) + r > N:
        raise ValueError(f"supp f must lie in the ball of radius N = {N}")
    lhs = riemann_sum(f, IntegerPointSet(d, "prim"), 1.0).real
    exp = prim_expansion(d, N, xi_cutoff)
    fhat = bump_fourier_transform(f, exp.xi)
    f0 = float(f(np.zeros((1, d)))[0])
    terms = np.append(exp.a_N * fhat, -exp.mertens * f0)
    rhs = _fsum_complex(terms)
    b, n = _lambda_points(d, N, xi_cutoff, xi_cutoff + 1)
    shell = bump_fourier_transform(f, b / n[:, None])
    a_shell = np.array([prim_coefficient(k, d, N) for k in n.tolist()]) if len(n) else np.zeros(0)
    tail = math.fsum(np.abs(a_shell * shell).tolist())
    return {"lhs": lhs, "rhs": rhs.real, "rhs_imag": rhs.imag, "abs_err": abs(lhs - rhs),
            "mertens": exp.mertens, "terms": len(exp), "tail_estimate": tail}


def twisted_density_check(d: int, eta, f: TestFunction,
                          eps_schedule: Sequence[float] | None = None) -> DensityEstimate:
    """Density of ``(Z^d_prim, exp(2 pi i <z, eta>))``; compare with
    ``prim_coefficient_limit(n_of_xi(eta), d)``.
    """
    eta = tuple(Fraction(v) for v in eta)
    if len(eta) != d:
        raise ValueError("eta dimension mismatch")
    n = n_of_xi(eta)
    if mobius(n) == 0:
        raise ValueError(f"mu(n(eta)) = mu({n}) = 0: no density formula for this eta")
    return estimate_density(f, IntegerPointSet(d, "prim", twist=eta), eps_schedule)
