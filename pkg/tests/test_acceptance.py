"""The fourteen acceptance criteria at their stated tolerances.

Each criterion prints one ``[PASS]``/``[FAIL]`` line; the lines are also
collected in :data:`RESULTS` and repeated in the pytest terminal summary.
Run standalone with ``python3 tests/test_acceptance.py``.
"""

import math
import random
import sys
import time
from fractions import Fraction

import pytest

from riemannsum.arith import (coprime_fraction, derangement_stats, iep_mobius_identity_check,
                              iep_odd_identity_check, random_lattice_function, zeta)
from riemannsum.core import (IntegerPointSet, ball_indicator, default_schedule, estimate_density,
                             smooth_bump)
from riemannsum.fourier import (GaussianFunction, Lattice, fibonacci_scheme, model_set,
                                poisson_check, prim_coefficient_limit, prim_expansion,
                                prim_poisson_check,
                                qc_spectrum, twisted_density_check)
from riemannsum.pythagoras import (enumerate_ppt, equidistribution_stat,
                                   fermat_characterization_check, lehmer_ratio, sector_count,
                                   sector_limit, somos_fixture)

SIX_PI2 = 6 / math.pi ** 2
RESULTS = {}


def rel(a, b):
    return abs(a / b - 1)


def report(num, title, passed, detail, elapsed):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {num:2d} {title}: {detail} ({elapsed:.2f} s)"
    RESULTS[num] = line
    print(line)
    assert passed, line


def timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


def test_01_somos_table():
    table, dt = timed(lambda: enumerate_ppt(9425))
    bad = [N for N, x, y, z in somos_fixture() if table[N - 1].as_tuple() != (x, y, z)]
    ok = not bad and dt < 1.0
    report(1, "triple table", ok, f"30 rows, mismatches={bad}", dt)


def test_02_lehmer_ratios():
    (a, b), dt = timed(lambda: (lehmer_ratio(100), lehmer_ratio(1500)))
    ok = abs(a - 6.29) <= 0.005 and abs(b - 6.28333) <= 1e-5 and dt < 1.0
    report(2, "Lehmer ratios", ok, f"N=100: {a:.6f}, N=1500: {b:.6f}, 2pi={2 * math.pi:.7f}", dt)


def test_03_coprime_density():
    (a, b), dt = timed(lambda: (float(coprime_fraction(10 ** 4)), float(coprime_fraction(10 ** 6))))
    ok = rel(a, SIX_PI2) < 5e-3 and rel(b, SIX_PI2) < 5e-4 and dt < 10.0
    report(3, "coprime density", ok, f"rel err {rel(a, SIX_PI2):.2e} (1e4), {rel(b, SIX_PI2):.2e} (1e6)", dt)


def test_04_primitive_density():
    f2, f3 = ball_indicator((0, 0), 1), ball_indicator((0, 0, 0), 1)

    def go():
        e2 = estimate_density(f2, IntegerPointSet(2, "prim"), default_schedule(1e-3))
        # 2^-8 keeps d = 3 inside the time budget; the samples are flat from there
        e3 = estimate_density(f3, IntegerPointSet(3, "prim"), default_schedule(2 ** -8))
        return e2.extrapolated.real, e3.extrapolated.real

    (c2, c3), dt = timed(go)
    t3 = 1 / zeta(3)
    ok = rel(c2, SIX_PI2) < 0.01 and rel(c3, t3) < 0.01 and dt < 60.0
    report(4, "primitive density", ok, f"d=2 rel err {rel(c2, SIX_PI2):.2e}, d=3 rel err {rel(c3, t3):.2e}", dt)


def test_05_parity_split():
    f = ball_indicator((0, 0), 1)

    def go():
        return tuple(estimate_density(f, IntegerPointSet(2, k), default_schedule(1e-3)).extrapolated.real
                     for k in ("prim_star", "odd_prim"))

    (s, o), dt = timed(go)
    ok = rel(s, 4 / math.pi ** 2) < 0.01 and rel(o, 2 / math.pi ** 2) < 0.01 and rel(s + o, SIX_PI2) < 0.015
    report(5, "parity split", ok, f"star {s:.6f}, odd {o:.6f}, sum {s + o:.6f}", dt)


def test_06_sector_limit():
    (a, b), dt = timed(lambda: (sector_count(10 ** 6, 0, 1) / 1e6,
                                sector_count(10 ** 6, 0, Fraction(1, 2)) / 1e6))
    tb = 2 / math.pi ** 2 * math.atan(0.5)
    ok = rel(a, 1 / (2 * math.pi)) < 0.02 and rel(b, tb) < 0.02 and abs(sector_limit(0, 0.5) - tb) < 1e-15
    report(6, "sector limit", ok, f"(0,1): {a:.6f}, (0,1/2): {b:.6f}", dt)


def test_07_equidistribution():
    st, dt = timed(lambda: equidistribution_stat(0, math.pi / 4, 10 ** 5))
    expected = 2 * (math.pi / 4) / math.pi ** 2 * 1e5
    ok = rel(st["count"], expected) < 0.02 and rel(st["ratio"], 0.125) < 0.02
    report(7, "equidistribution", ok, f"count {st['count']} vs {expected:.1f}, ratio {st['ratio']:.6f}", dt)


def test_08_exact_iep():
    rng = random.Random(8)

    def go():
        fails = 0
        for k in range(100):
            d = (1, 2, 3)[k % 3]
            fails += not iep_mobius_identity_check(random_lattice_function(rng, d, 12)).equal
            fails += not iep_odd_identity_check(random_lattice_function(rng, 2, 16)).equal
        return fails

    fails, dt = timed(go)
    report(8, "exact IEP identities", fails == 0 and dt < 30.0, f"100 functions, {fails} failures", dt)


def test_09_fermat():
    r, dt = timed(lambda: fermat_characterization_check(10 ** 4))
    report(9, "Fermat characterization", r["consistent"], f"mismatches={len(r['mismatches'])}", dt)


def test_10_derangements():
    def go():
        import mpmath
        mpmath.mp.dps = 60
        worst = 0.0
        for n in range(1, 21):
            p = derangement_stats(n).probability
            err = abs(mpmath.mpf(p.numerator) / p.denominator - mpmath.exp(-1))
            worst = max(worst, float(err * math.factorial(n + 1)))
        return worst

    worst, dt = timed(go)
    report(10, "derangements", worst < 1, f"max (n+1)! |D_n/n! - 1/e| = {worst:.4f}", dt)


def test_11_poisson():
    def go():
        return max(poisson_check(GaussianFunction(d, t), Lattice.integer(d), eta=eta)["abs_err"]
                   for d, eta in ((1, None), (1, (Fraction(1, 3),)), (2, None), (2, (Fraction(1, 3), 0)))
                   for t in (0.5, 1.0, 2.0))

    worst, dt = timed(go)
    report(11, "Poisson summation", worst < 1e-10, f"max abs_err {worst:.2e}", dt)


def test_12_model_set():
    tau = (1 + math.sqrt(5)) / 2

    def go():
        import numpy as np
        S = fibonacci_scheme()
        x = np.sort(model_set(S, 1000).enumerate(1000)[0][:, 0])
        gaps = np.unique(np.round(np.diff(x), 9))
        dens = estimate_density(smooth_bump((0.0,), 1.0), model_set(S, 1000), default_schedule(1e-3))
        a0 = qc_spectrum(S, 1.0, 1e-3)[0].amplitude.real
        return S.density, gaps, dens.extrapolated.real, a0

    (rho, gaps, est, a0), dt = timed(go)
    ok = (len(gaps) == 2 and abs(gaps[1] / gaps[0] - tau) < 1e-9
          and rel(est, rho) < 0.01 and abs(a0 - rho) < 1e-12)
    report(12, "model set", ok, f"gaps {len(gaps)}, density {est:.6f} vs {rho:.6f}, a(0) {a0:.12f}", dt)


def test_13_prim_expansion():
    f = smooth_bump((0.0, 0.0), 6.0)

    def go():
        return [prim_poisson_check(2, f, 8, c) for c in (4, 8, 16, 32)]

    rs, dt = timed(go)
    errs = [r["abs_err"] for r in rs]
    ok = (all(b < a for a, b in zip(errs, errs[1:])) and errs[-1] < 0.01 * abs(rs[-1]["lhs"])
          and dt < 300)
    report(13, "prim near-Poisson expansion", ok, "abs_err " + ", ".join(f"{e:.2e}" for e in errs), dt)


def test_14_twisted_density():
    est, dt = timed(lambda: twisted_density_check(2, (Fraction(1, 2), 0), ball_indicator((0, 0), 1)))
    entry = next(e for e in prim_expansion(2, 8, 0.6).entries
                 if tuple(e["xi"]) == (Fraction(1, 2), 0))
    target = entry["a_limit"]
    assert target == pytest.approx(prim_coefficient_limit(2, 2), rel=1e-14)
    v = est.extrapolated.real
    report(14, "twisted density", rel(v, target) < 0.03, f"{v:.6f} vs a_limit {target:.6f}", dt)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
