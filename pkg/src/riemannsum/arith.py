"""Moebius function, zeta values, primitive point sets and exact IEP identities."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping

import numpy as np

from . import _backend
from .core import IntegerPointSet

__all__ = [
    "MobiusTable", "mobius_sieve", "mobius", "zeta", "PrimitiveSetKind",
    "primitive_points", "LatticeFunction", "iep_mobius_identity_check",
    "iep_odd_identity_check", "IdentityCheck", "coprime_fraction",
    "coprime_count_bruteforce", "derangement_stats", "DerangementStats",
    "random_lattice_function", "totients",
]


@dataclass(frozen=True)
class MobiusTable:
    limit: int
    values: np.ndarray  # values[k] = mu(k) for 1 <= k <= limit; values[0] = 0

    def __getitem__(self, k):
        return int(self.values[k])

    def mertens(self, n=None):
        n = self.limit if n is None else n
        return int(self.values[1:n + 1].sum(dtype=np.int64))


def mobius_sieve(K: int) -> MobiusTable:
    """mu(1..K) by the linear sieve."""
    if K < 1:
        raise ValueError("K must be >= 1")
    mu, _ = _backend.linear_sieve(K)
    mu.setflags(write=False)
    return MobiusTable(int(K), mu)


def totients(K: int) -> np.ndarray:
    """Euler phi(0..K) (phi[0] = 0) from the linear sieve."""
    _, phi = _backend.linear_sieve(K)
    return phi


@lru_cache(maxsize=None)
def _mobius_table(K):
    return mobius_sieve(K)


def mobius(k: int) -> int:
    """mu(k) for a single k (table-backed for small k, trial division above)."""
    if k < 1:
        raise ValueError("mu is defined for k >= 1")
    if k <= 1 << 16:
        return _mobius_table(1 << 16)[k]
    sign, p = 1, 2
    while p * p <= k:
        if k % p == 0:
            k //= p
            if k % p == 0:
                return 0
            sign = -sign
        p += 1
    return -sign if k > 1 else sign


def zeta(d: int, tol: float = 1e-12) -> float:
    """zeta(d) for integer d >= 2 with absolute error below ``tol``.

    The partial sum up to M is completed with the midpoint of the integral
    bracket ``[int_{M+1}^inf, int_M^inf] x^-d dx``; M is chosen so that half
    the bracket width is below ``tol``.
    """
    if d < 2:
        raise ValueError("zeta(d) diverges for d < 2")
    # half width ~ M^-d / 2
    M = max(10, math.ceil((2 * tol) ** (-1.0 / d)))
    n = np.arange(M, 0, -1, dtype=np.float64)
    head = math.fsum((n ** -d).tolist())
    lower = (M + 1) ** (1 - d) / (d - 1)
    upper = M ** (1 - d) / (d - 1)
    return head + (lower + upper) / 2


# ---------------------------------------------------------------------------
# primitive point sets

class PrimitiveSetKind:
    """Tags for the primitive sets: ``PRIM(d)``, ``PRIM_STAR``, ``ODD_PRIM``."""

    PRIM_STAR = ("prim_star", 2)
    ODD_PRIM = ("odd_prim", 2)

    @staticmethod
    def PRIM(d: int):
        if d < 1:
            raise ValueError("dimension must be >= 1")
        return ("prim", d)


def primitive_points(kind, R: float | None = None):
    """Point source for a primitive set; with ``R`` the points of norm <= R.

    Returns an :class:`IntegerPointSet` when ``R`` is None, else the
    ``(points, weights)`` pair of its enumeration.
    """
    name, d = kind
    src = IntegerPointSet(d, name)
    if R is None:
        return src
    if R < 0:
        raise ValueError("R must be >= 0")
    return src.enumerate(R)


# ---------------------------------------------------------------------------
# exact IEP identities

@dataclass(frozen=True)
class LatticeFunction:
    """Rational-valued function on Z^d vanishing outside the ball of ``support_radius``."""

    dimension: int
    support_radius: float
    func: Callable[[tuple], Fraction]

    def __call__(self, z) -> Fraction:
        return self.func(tuple(int(v) for v in z))

    @classmethod
    def from_values(cls, values: Mapping[tuple, Fraction], dimension: int | None = None):
        values = {tuple(int(c) for c in k): Fraction(v) for k, v in values.items()}
        d = dimension or len(next(iter(values)))
        radius = max((math.sqrt(sum(c * c for c in k)) for k in values), default=0.0)
        return cls(d, radius, lambda z: values.get(z, Fraction(0)))

    @classmethod
    def box(cls, lo, hi, value=1):
        value = Fraction(value)
        lo, hi = tuple(lo), tuple(hi)
        radius = math.sqrt(sum(max(abs(a), abs(b)) ** 2 for a, b in zip(lo, hi)))

        def f(z):
            return value if all(a <= c <= b for c, a, b in zip(z, lo, hi)) else Fraction(0)
        return cls(len(lo), radius, f)

    @classmethod
    def ball(cls, center, radius, value=1):
        value = Fraction(value)
        c = tuple(Fraction(v) for v in center)
        r2 = Fraction(radius) ** 2
        reach = math.sqrt(sum(float(v) ** 2 for v in c)) + float(radius)

        def f(z):
            return value if sum((a - b) ** 2 for a, b in zip(z, c)) <= r2 else Fraction(0)
        return cls(len(c), reach, f)


@dataclass(frozen=True)
class IdentityCheck:
    lhs: Fraction
    rhs: Fraction
    equal: bool


def _ball_points(d, R, predicate=None):
    """Integer points with |z| <= R in lexicographic order."""
    b = int(math.floor(R))
    r2 = R * R
    out = []

    def rec(prefix, used):
        if len(prefix) == d:
            if predicate is None or predicate(prefix):
                out.append(tuple(prefix))
            return
        rem = r2 - used
        if rem < 0:
            return
        m = min(b, math.isqrt(int(math.floor(rem))))
        for v in range(-m, m + 1):
            rec(prefix + [v], used + v * v)

    rec([], 0)
    return out


def _gcd_all(z):
    return math.gcd(*z) if z else 0


def iep_mobius_identity_check(f: LatticeFunction, d: int | None = None) -> IdentityCheck:
    """``sum_{Z^d_prim} f = sum_k mu(k) sum_{w != 0} f(k w)`` in exact arithmetic.

    k runs up to the support radius: any surviving term has ``|k w| <= R``
    with ``|w| >= 1``.
    """
    d = d or f.dimension
    R = f.support_radius
    lhs = sum((f(z) for z in _ball_points(d, R) if _gcd_all(z) == 1), Fraction(0))
    K = max(1, int(math.floor(R)))
    rhs = Fraction(0)
    for k in range(1, K + 1):
        m = mobius(k)
        if m == 0:
            continue
        inner = Fraction(0)
        for w in _ball_points(d, R / k):
            if any(w):
                inner += f(tuple(k * c for c in w))
        rhs += m * inner
    return IdentityCheck(lhs, rhs, lhs == rhs)


def iep_odd_identity_check(f: LatticeFunction) -> IdentityCheck:
    """``sum_{(Z^odd)^2_prim} f = sum_k mu(k) sum_h sum_{w in (Z^odd)^2} f(k 2^h w)``.

    Truncated at ``k 2^h <= R`` (surviving terms need ``|k 2^h w| <= R``).
    """
    R = f.support_radius

    def odd(z):
        return z[0] % 2 == 1 and z[1] % 2 == 1

    lhs = sum((f(z) for z in _ball_points(2, R) if odd(z) and math.gcd(*z) == 1),
              Fraction(0))
    rhs = Fraction(0)
    K = max(1, int(math.floor(R)))
    for k in range(1, K + 1):
        m = mobius(k)
        if m == 0:
            continue
        t = k
        while t <= max(R, 1):
            inner = Fraction(0)
            for w in _ball_points(2, R / t, odd):
                inner += f((t * w[0], t * w[1]))
            rhs += m * inner
            t *= 2
    return IdentityCheck(lhs, rhs, lhs == rhs)


def random_lattice_function(rng: random.Random, d: int, max_radius: int = 20) -> LatticeFunction:
    """Random compactly supported rational-valued function for property checks.

    Mixes box and ball indicators with sparse random rational point masses.
    """
    choice = rng.randrange(3)
    if choice == 0:
        lo = [rng.randint(-max_radius // 2, max_radius // 2) for _ in range(d)]
        hi = [min(a + rng.randint(0, max_radius // 2), max_radius // 2) for a in lo]
        hi = [max(a, b) for a, b in zip(lo, hi)]
        return LatticeFunction.box(lo, hi, Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 7)))
    if choice == 1:
        r = rng.randint(1, max_radius // 2)
        c = [rng.randint(-(max_radius - r) // 2, (max_radius - r) // 2) for _ in range(d)]
        return LatticeFunction.ball(c, r, Fraction(rng.randint(1, 9), rng.randint(1, 7)))
    bound = int(max_radius / math.sqrt(d))
    values = {}
    for _ in range(rng.randint(1, 40)):
        z = tuple(rng.randint(-bound, bound) for _ in range(d))
        values[z] = Fraction(rng.randint(-20, 20), rng.randint(1, 12))
    return LatticeFunction.from_values(values, d)


# ---------------------------------------------------------------------------
# coprime pairs and derangements

def coprime_fraction(N: int) -> Fraction:
    """Fraction of pairs in [1, N]^2 that are coprime, via the totient sum.

    ``#{(a, b) : gcd = 1} = 2 sum_{n <= N} phi(n) - 1``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    phi = totients(N)
    count = 2 * int(phi[1:].sum(dtype=np.int64)) - 1
    return Fraction(count, N * N)


def coprime_count_bruteforce(N: int) -> int:
    return sum(1 for a in range(1, N + 1) for b in range(1, N + 1) if math.gcd(a, b) == 1)


@dataclass(frozen=True)
class DerangementStats:
    n: int
    count: int
    probability: Fraction


def derangement_stats(n: int) -> DerangementStats:
    """D_n = sum_k (-1)^k n!/k!, the IEP count of fixed-point-free permutations."""
    if n < 0:
        raise ValueError("n must be >= 0")
    total, term = 0, 1  # term = n!/k! built downward from k = n
    for k in range(n, -1, -1):
        total += (-1) ** k * term
        term *= k if k > 0 else 1
    fact = math.factorial(n)
    return DerangementStats(n, total, Fraction(total, fact))
