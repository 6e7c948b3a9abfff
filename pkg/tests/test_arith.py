import itertools
import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riemannsum.arith import (LatticeFunction, PrimitiveSetKind, coprime_count_bruteforce,
                              coprime_fraction, derangement_stats, iep_mobius_identity_check,
                              iep_odd_identity_check, mobius, mobius_sieve, primitive_points,
                              random_lattice_function, zeta)
from riemannsum.core import IntegerPointSet, ball_indicator, riemann_sum


class TestMobius:
    def test_first_values(self):
        t = mobius_sieve(6)
        assert [t[k] for k in range(1, 7)] == [1, -1, -1, 0, -1, 1]

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            mobius_sieve(0)

    def test_mertens_100(self):
        assert mobius_sieve(100).mertens() == 1

    def test_reciprocal_zeta_series(self):
        mu = mobius_sieve(10 ** 4).values.astype(float)
        k = np.arange(len(mu), dtype=float)
        s = math.fsum((mu[1:] / k[1:] ** 2).tolist())
        assert abs(s - 6 / math.pi ** 2) < 1e-3

    def test_divisor_sum_identity(self):
        K = 10 ** 4
        mu = mobius_sieve(K).values.astype(np.int64)
        acc = np.zeros(K + 1, dtype=np.int64)
        for d in range(1, K + 1):
            acc[d::d] += mu[d]
        assert acc[1] == 1 and not np.any(acc[2:])

    def test_large_argument_by_trial_division(self):
        assert mobius(2 * 3 * 5 * 7 * 11 * 13 * 17) == -1
        assert mobius(65537 * 65539) == 1
        assert mobius(4 * 65537) == 0


class TestZeta:
    def test_known_values(self):
        assert zeta(2, 1e-10) == pytest.approx(math.pi ** 2 / 6, abs=1e-10)
        assert zeta(4, 1e-10) == pytest.approx(math.pi ** 4 / 90, abs=1e-10)
        assert 1 / zeta(2) == pytest.approx(0.6079271019, abs=1e-10)

    def test_divergent_rejected(self):
        with pytest.raises(ValueError):
            zeta(1)


class TestPrimitiveSets:
    def test_small_ball(self):
        pts, _ = primitive_points(PrimitiveSetKind.PRIM(2), 1.5)
        assert {tuple(p) for p in pts.tolist()} == {
            (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)}

    def test_odd_prim_radius_2(self):
        pts, _ = primitive_points(PrimitiveSetKind.ODD_PRIM, 2)
        assert {tuple(p) for p in pts.tolist()} == {(1, 1), (1, -1), (-1, 1), (-1, -1)}

    def test_set_algebra(self):
        for R in list(range(0, 101, 9)) + [100]:
            prim = {tuple(p) for p in primitive_points(PrimitiveSetKind.PRIM(2), R)[0].tolist()}
            star = {tuple(p) for p in primitive_points(PrimitiveSetKind.PRIM_STAR, R)[0].tolist()}
            odd = {tuple(p) for p in primitive_points(PrimitiveSetKind.ODD_PRIM, R)[0].tolist()}
            assert star == prim - odd and not (star & odd)

    def test_density_decomposition(self):
        f = ball_indicator((0, 0), 1)
        vals = {k: riemann_sum(f, IntegerPointSet(2, k), 1e-3).real / math.pi
                for k in ("prim", "prim_star", "odd_prim")}
        assert abs(vals["prim"] / (6 / math.pi ** 2) - 1) < 0.01
        assert abs(vals["prim_star"] / (4 / math.pi ** 2) - 1) < 0.01
        assert abs(vals["odd_prim"] / (2 / math.pi ** 2) - 1) < 0.01
        assert vals["prim"] == pytest.approx(vals["prim_star"] + vals["odd_prim"], rel=1e-12)

    def test_prim_star_rejects_other_dimensions(self):
        with pytest.raises(ValueError):
            IntegerPointSet(3, "prim_star")


class TestIEP:
    def test_box_minus3_3(self):
        # brute force: 48 nonzero points minus 16 with gcd 2 or 3
        r = iep_mobius_identity_check(LatticeFunction.box((-3, -3), (3, 3)))
        brute = sum(1 for a in range(-3, 4) for b in range(-3, 4) if math.gcd(a, b) == 1)
        assert brute == 32
        assert r.lhs == r.rhs == 32 and r.equal

    def test_non_primitive_point(self):
        r = iep_mobius_identity_check(LatticeFunction.from_values({(2, 4): 1}))
        assert r.lhs == 0 == r.rhs

    def test_primitive_point(self):
        r = iep_mobius_identity_check(LatticeFunction.from_values({(1, 0): 1}))
        assert r.lhs == 1 == r.rhs

    def test_odd_box(self):
        r = iep_odd_identity_check(LatticeFunction.box((-5, -5), (5, 5)))
        brute = sum(1 for a in range(-5, 6) for b in range(-5, 6)
                    if a % 2 and b % 2 and math.gcd(a, b) == 1)
        assert r.lhs == r.rhs == brute

    def test_odd_single_points(self):
        r = iep_odd_identity_check(LatticeFunction.from_values({(3, 9): 1}))
        assert r.lhs == 0 == r.rhs
        r = iep_odd_identity_check(LatticeFunction.from_values({(1, 1): 1}))
        assert r.lhs == 1 == r.rhs

    def test_randomized_family(self):
        rng = random.Random(2024)
        for _ in range(20):
            d = rng.choice([2, 3])
            assert iep_mobius_identity_check(random_lattice_function(rng, d, 12)).equal
            assert iep_odd_identity_check(random_lattice_function(rng, 2, 20)).equal

    @settings(max_examples=25, deadline=None)
    @given(st.dictionaries(st.tuples(st.integers(-8, 8), st.integers(-8, 8)),
                           st.fractions(min_value=-5, max_value=5, max_denominator=9),
                           min_size=1, max_size=12))
    def test_identities_hold_for_point_masses(self, values):
        f = LatticeFunction.from_values(values, 2)
        assert iep_mobius_identity_check(f).equal
        assert iep_odd_identity_check(f).equal


class TestCoprimeAndDerangements:
    def test_small(self):
        assert coprime_fraction(4) == Fraction(11, 16)
        assert coprime_fraction(1) == 1

    @pytest.mark.parametrize("N", [2, 7, 30, 101])
    def test_against_brute_force(self, N):
        assert coprime_fraction(N) == Fraction(coprime_count_bruteforce(N), N * N)

    def test_limit(self):
        assert abs(float(coprime_fraction(10 ** 4)) / (6 / math.pi ** 2) - 1) < 0.005

    def test_derangement_counts(self):
        assert derangement_stats(1).count == 0
        brute = sum(1 for p in itertools.permutations(range(4)) if all(p[i] != i for i in range(4)))
        assert derangement_stats(4).count == brute == 9

    def test_derangement_limit(self):
        assert abs(float(derangement_stats(12).probability) - math.exp(-1)) < 1e-8
        mpmath.mp.dps = 50
        for n in range(1, 21):
            p = derangement_stats(n).probability
            err = abs(mpmath.mpf(p.numerator) / p.denominator - mpmath.exp(-1))
            assert err < mpmath.mpf(1) / math.factorial(n + 1)
