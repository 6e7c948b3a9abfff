import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from riemannsum.pythagoras import (enumerate_ppt, equidistribution_stat,
                                   fermat_characterization_check, lehmer_ratio, ppt_from_pair,
                                   rational_circle_points, sector_count, sector_limit,
                                   somos_fixture)


def test_fixture_shape():
    rows = somos_fixture()
    assert len(rows) == 30
    assert [r[0] for r in rows] == list(range(1, 21)) + list(range(1491, 1501))


class TestGeneration:
    def test_first_rows(self):
        assert ppt_from_pair(2, 1).as_tuple() == (3, 4, 5)
        assert ppt_from_pair(3, 2).as_tuple() == (5, 12, 13)

    def test_large_pair(self):
        t = ppt_from_pair(97, 32)
        assert t.as_tuple() == (8385, 6208, 10433)
        assert t.x ** 2 + t.y ** 2 == t.z ** 2

    @pytest.mark.parametrize("m,n,what", [(1, 1, "m > n"), (3, 0, "n >= 1"),
                                          (6, 3, "gcd"), (5, 3, "odd")])
    def test_precondition_named(self, m, n, what):
        with pytest.raises(ValueError, match=what):
            ppt_from_pair(m, n)

    @given(st.integers(2, 400), st.integers(1, 399))
    def test_invariants(self, m, n):
        if not (m > n and math.gcd(m, n) == 1 and (m - n) % 2):
            return
        t = ppt_from_pair(m, n)
        assert t.x ** 2 + t.y ** 2 == t.z ** 2
        assert math.gcd(t.x, t.y) == math.gcd(t.y, t.z) == math.gcd(t.x, t.z) == 1
        assert t.x % 2 == 1 and t.y % 2 == 0


class TestEnumeration:
    def test_tie_break_at_65(self):
        t = enumerate_ppt(70)
        assert t[9].as_tuple() == (63, 16, 65) and t[10].as_tuple() == (33, 56, 65)

    def test_row_1500(self):
        assert enumerate_ppt(9425)[1499].as_tuple() == (1233, 9344, 9425)

    def test_smallest(self):
        assert [t.as_tuple() for t in enumerate_ppt(5)] == [(3, 4, 5)]

    def test_all_published_rows(self):
        t = enumerate_ppt(9425)
        for N, x, y, z in somos_fixture():
            assert t[N - 1].as_tuple() == (x, y, z)

    def test_bijection_with_sector_count(self):
        zs = np.array([t.z for t in enumerate_ppt(10 ** 4)])
        for N in list(range(1, 120)) + list(range(120, 10 ** 4 + 1, 97)) + [10 ** 4]:
            assert int(np.count_nonzero(zs <= N)) == sector_count(N, 0, 1)


class TestLehmer:
    def test_published_ratios(self):
        assert lehmer_ratio(1) == 5.0
        assert abs(lehmer_ratio(100) - 6.29) <= 0.005
        assert lehmer_ratio(1000) == pytest.approx(6.277, abs=1e-12)
        assert abs(lehmer_ratio(1500) - 6.28333) <= 1e-5

    def test_z_n_nondecreasing(self):
        zs = [lehmer_ratio(N) * N for N in range(1, 300)]
        assert all(b >= a - 1e-9 for a, b in zip(zs, zs[1:]))


class TestSector:
    def test_boundary_inclusive(self):
        # (2,1), (3,2), (4,1), (4,3): 4^2 + 3^2 = 25 counts
        assert sector_count(25, 0, 1) == 4
        assert sector_count(24, 0, 1) == 3

    def test_limits(self):
        assert abs(sector_count(10 ** 6, 0, 1) / 1e6 * 2 * math.pi - 1) < 0.02
        assert abs(sector_count(10 ** 6, 0, Fraction(1, 2)) / 1e6
                   / (2 / math.pi ** 2 * math.atan(0.5)) - 1) < 0.02
        assert sector_limit(0, 1) == pytest.approx(1 / (2 * math.pi))

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            sector_count(100, 0.5, 0.5)


class TestCirclePoints:
    def test_counts(self):
        assert len(rational_circle_points(1)) == 4
        assert len(rational_circle_points(5)) == 12

    def test_height_and_angles(self):
        pts = rational_circle_points(2000)
        for r in pts:
            assert r.p * r.p + r.q * r.q == 1
            assert r.height == math.lcm(r.p.denominator, r.q.denominator)
            assert 0 <= r.angle < 2 * math.pi
        assert all(a.angle <= b.angle for a, b in zip(pts, pts[1:]))

    def test_angle_doubling(self):
        for t in enumerate_ppt(3000):
            theta = math.atan2(t.y, t.x)
            assert theta == pytest.approx(2 * t.half_angle(), abs=1e-12)

    def test_parity_swap(self):
        pts = rational_circle_points(10 ** 4)
        odd = sum(1 for r in pts if r.p.numerator % 2)
        assert odd == len(pts) - odd

    def test_equidistribution(self):
        assert equidistribution_stat(0, 2 * math.pi, 50)["ratio"] == 1
        st = equidistribution_stat(0, math.pi / 2, 10 ** 4)
        assert abs(st["ratio"] / 0.25 - 1) < 0.02


class TestFermat:
    def test_multiplicities(self):
        mult = {}
        for t in enumerate_ppt(9425):
            mult[t.z] = mult.get(t.z, 0) + 1
        assert mult[65] == 2 and mult[9425] == 4 and 9 not in mult

    def test_consistent(self):
        r = fermat_characterization_check(10 ** 4)
        assert r["consistent"] and r["mismatches"] == []
