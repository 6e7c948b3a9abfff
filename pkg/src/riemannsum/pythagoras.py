"""Primitive Pythagorean triples, their hypotenuse order, and rational points on S^1."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import List

import mpmath
import numpy as np

__all__ = [
    "PPTriple", "ppt_from_pair", "enumerate_ppt", "lehmer_ratio", "sector_count",
    "sector_limit", "RationalCirclePoint", "rational_circle_points",
    "equidistribution_stat", "fermat_characterization_check", "somos_fixture",
    "exact_angle",
]

_ANGLE_DPS = 40


@dataclass(frozen=True)
class PPTriple:
    """Primitive triple in canonical form: odd leg ``x``, even leg ``y``."""

    x: int
    y: int
    z: int
    m: int
    n: int

    def __post_init__(self):
        if self.x * self.x + self.y * self.y != self.z * self.z:
            raise ValueError(f"({self.x}, {self.y}, {self.z}) is not Pythagorean")
        if self.x % 2 != 1 or self.y % 2 != 0:
            raise ValueError("canonical form needs x odd and y even")

    def as_tuple(self):
        return (self.x, self.y, self.z)

    def half_angle(self) -> float:
        """Theta(m, n) = arctan(n/m); the point (x/z, y/z) sits at twice this angle."""
        return math.atan2(self.n, self.m)


def ppt_from_pair(m: int, n: int) -> PPTriple:
    """``(m^2 - n^2, 2mn, m^2 + n^2)`` for coprime m > n >= 1 of opposite parity."""
    if not n >= 1:
        raise ValueError(f"need n >= 1, got n={n}")
    if not m > n:
        raise ValueError(f"need m > n, got m={m}, n={n}")
    if math.gcd(m, n) != 1:
        raise ValueError(f"need gcd(m, n) = 1, got gcd={math.gcd(m, n)}")
    if (m - n) % 2 == 0:
        raise ValueError(f"need m - n odd, got m - n = {m - n}")
    return PPTriple(m * m - n * n, 2 * m * n, m * m + n * n, m, n)


def _pairs(z_max: int):
    """Admissible generator pairs (m, n) with m^2 + n^2 <= z_max."""
    m = 2
    while m * m + 1 <= z_max:
        top = min(m - 1, math.isqrt(max(z_max - m * m, 0)))
        for n in range(1 + (m % 2), top + 1, 2):
            if math.gcd(m, n) == 1:
                yield m, n
        m += 1


def enumerate_ppt(z_max: int) -> List[PPTriple]:
    """All PPTs with ``z <= z_max`` sorted by hypotenuse, ties by the even leg."""
    if z_max < 5:
        raise ValueError("z_max must be >= 5")
    out = [ppt_from_pair(m, n) for m, n in _pairs(z_max)]
    out.sort(key=lambda t: (t.z, t.y))
    return out


def lehmer_ratio(N: int) -> float:
    """``z_N / N`` for the N-th triple in hypotenuse order."""
    if N < 1:
        raise ValueError("N must be >= 1")
    z_max = max(5, int(2 * math.pi * N * 1.2) + 50)
    while True:
        triples = enumerate_ppt(z_max)
        if len(triples) >= N:
            return triples[N - 1].z / N
        z_max *= 2


def sector_count(N: int, alpha: float, beta: float) -> int:
    """``|P(N; alpha, beta)|``: coprime (m, n), m - n odd, alpha <= n/m <= beta, m^2+n^2 <= N.

    ``alpha``/``beta`` may be floats or Fractions; the slope test is exact.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    a, b = Fraction(alpha), Fraction(beta)
    if not 0 <= a < b <= 1:
        raise ValueError("need 0 <= alpha < beta <= 1")
    count = 0
    for m in range(1, math.isqrt(N) + 1):
        top = math.isqrt(N - m * m)
        lo = math.ceil(a * m)
        hi = min(math.floor(b * m), top)
        if lo < 1:
            lo = 1
        if lo > hi:
            continue
        n = np.arange(lo, hi + 1)
        ok = ((m - n) % 2 == 1) & (np.gcd(m, n) == 1)
        count += int(ok.sum())
    return count


def sector_limit(alpha: float, beta: float) -> float:
    """``lim |P(N; alpha, beta)| / N = (2/pi^2) arctan((beta-alpha)/(1+alpha beta))``."""
    return 2 / math.pi ** 2 * math.atan((beta - alpha) / (1 + alpha * beta))


# ---------------------------------------------------------------------------
# rational points on the circle

@dataclass(frozen=True)
class RationalCirclePoint:
    p: Fraction
    q: Fraction
    height: int
    angle: float


def exact_angle(p: Fraction, q: Fraction) -> float:
    """Angle of ``(p, q)`` in [0, 2 pi), from a 40-digit atan2 of the exact rationals."""
    with mpmath.workdps(_ANGLE_DPS):
        t = mpmath.atan2(mpmath.mpf(q.numerator) / q.denominator,
                         mpmath.mpf(p.numerator) / p.denominator)
        if t < 0:
            t += 2 * mpmath.pi
        return float(t)


def _circle_points(h_max):
    pts = [(Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)),
           (Fraction(-1), Fraction(0)), (Fraction(0), Fraction(-1))]
    heights = [1, 1, 1, 1]
    if h_max >= 5:
        for t in enumerate_ppt(h_max):
            for a, b in ((t.x, t.y), (t.y, t.x)):
                for sa in (1, -1):
                    for sb in (1, -1):
                        pts.append((Fraction(sa * a, t.z), Fraction(sb * b, t.z)))
                        heights.append(t.z)
    return pts, heights


def rational_circle_points(h_max: int) -> List[RationalCirclePoint]:
    """Points of S^1(Q) with height <= h_max, sorted by angle."""
    if h_max < 1:
        raise ValueError("h_max must be >= 1")
    pts, heights = _circle_points(h_max)
    out = [RationalCirclePoint(p, q, h, exact_angle(p, q)) for (p, q), h in zip(pts, heights)]
    out.sort(key=lambda r: r.angle)
    return out


def equidistribution_stat(theta1: float, theta2: float, h_max: int):
    """Count of height-<= h_max rational points with angle in ``[theta1, theta2)``.

    Returns ``{count, total, ratio, expected}`` with ``expected = (theta2 - theta1)/2pi``.
    """
    if not 0 <= theta1 < theta2 <= 2 * math.pi + 1e-15:
        raise ValueError("need 0 <= theta1 < theta2 <= 2 pi")
    pts = rational_circle_points(h_max)
    angles = np.array([r.angle for r in pts])
    full = theta1 == 0 and theta2 >= 2 * math.pi
    count = len(pts) if full else int(np.count_nonzero((angles >= theta1) & (angles < theta2)))
    return {
        "count": count,
        "total": len(pts),
        "ratio": count / len(pts),
        "expected": (theta2 - theta1) / (2 * math.pi),
    }


def _factor(n: int) -> dict:
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def fermat_characterization_check(z_max: int):
    """Compare hypotenuse multiplicities with ``2^(nu(z)-1)`` (primes all 1 mod 4).

    Returns ``{consistent, mismatches}``, mismatches as ``(z, observed, predicted)``.
    """
    if z_max < 5:
        raise ValueError("z_max must be >= 5")
    mult = {}
    for t in enumerate_ppt(z_max):
        mult[t.z] = mult.get(t.z, 0) + 1
    mismatches = []
    for z in range(3, z_max + 1, 2):
        primes = _factor(z)
        predicted = 2 ** (len(primes) - 1) if all(p % 4 == 1 for p in primes) else 0
        observed = mult.get(z, 0)
        if observed != predicted:
            mismatches.append((z, observed, predicted))
    # even hypotenuses never occur
    mismatches.extend((z, c, 0) for z, c in mult.items() if z % 2 == 0)
    return {"consistent": not mismatches, "mismatches": mismatches}


def somos_fixture():
    """The 30 published table rows as ``[(N, x, y, z), ...]``."""
    text = resources.files("riemannsum").joinpath("data/somos_ppt.csv").read_text()
    rows = list(csv.DictReader(text.splitlines()))
    return [(int(r["N"]), int(r["x"]), int(r["y"]), int(r["z"])) for r in rows]
