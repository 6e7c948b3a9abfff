import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st
from scipy import integrate

from riemannsum.core import (ExplicitPointSource, IntegerPointSet, ball_indicator,
                             box_indicator, combination, default_schedule, delone_check,
                             delone_density_bounds, estimate_density, fit_intercept, integral,
                             partition_riemann_sum, riemann_sum, sector_indicator, smooth_bump)


def gauss_circle_count(r):
    """#{(x, y) : x^2 + y^2 <= r^2}, integer r, by columns."""
    return sum(2 * math.isqrt(r * r - x * x) + 1 for x in range(-r, r + 1))


class TestRiemannSum:
    def test_unit_box_on_z2(self):
        f = box_indicator((0, 0), (1, 1))
        assert riemann_sum(f, IntegerPointSet(2), 1.0) == 4
        assert riemann_sum(f, IntegerPointSet(2), 1.0, exact=True) == 4

    def test_empty_source(self):
        f = ball_indicator((0, 0), 1)
        far = ExplicitPointSource([[100.0, 100.0]])
        assert riemann_sum(f, far, 0.5) == 0

    def test_zero_support_is_empty_sum(self):
        assert riemann_sum(ball_indicator((0, 0), 0.0), IntegerPointSet(2), 0.1) == 0

    def test_gauss_circle(self):
        value = riemann_sum(ball_indicator((0, 0), 1), IntegerPointSet(2), 1e-3)
        # lattice count at radius 1000 is the exact oracle
        assert value.real == pytest.approx(gauss_circle_count(1000) * 1e-6, rel=1e-12)
        assert abs(value.real - math.pi) / math.pi < 0.01

    def test_contract_violations(self):
        with pytest.raises(ValueError, match="dimension"):
            riemann_sum(ball_indicator((0, 0, 0), 1), IntegerPointSet(2), 0.1)
        with pytest.raises(ValueError, match="eps"):
            riemann_sum(ball_indicator((0, 0), 1), IntegerPointSet(2), 0.0)
        with pytest.raises(ValueError):
            riemann_sum(ball_indicator((0, 0), 1), IntegerPointSet(2), -1.0)

    def test_linearity_exact_and_float(self):
        f = box_indicator((0, 0), (1, 1))
        g = ball_indicator((3, 3), 0.75)
        h = combination([(Fraction(3), f), (Fraction(-2, 7), g)])
        src = IntegerPointSet(2)
        for eps in (Fraction(1, 8), Fraction(1, 10)):
            lhs = riemann_sum(h, src, eps, exact=True)
            rhs = 3 * riemann_sum(f, src, eps, exact=True) - Fraction(2, 7) * riemann_sum(
                g, src, eps, exact=True)
            assert lhs == rhs
            fl = riemann_sum(h, src, float(eps)).real
            assert fl == pytest.approx(float(rhs), abs=1e-12)

    def test_matches_corner_partition_sum_exactly(self):
        for f in (ball_indicator((0.3, -0.2), 1.1), sector_indicator(0, 1, 1),
                  box_indicator((-0.4, 0.1), (0.9, 0.7)), smooth_bump((0.1, 0.2), 0.8)):
            for eps in (2 ** -5, 0.013):
                assert riemann_sum(f, IntegerPointSet(2), eps).real == \
                    partition_riemann_sum(f, eps, "corner")

    def test_monotone_refinement(self):
        # {|a| = 1 or |b| = 1} is inside Z^2_prim, which is inside Z^2
        pts = [(a, b) for a in range(-60, 61) for b in range(-60, 61) if abs(a) == 1 or abs(b) == 1]
        sub = ExplicitPointSource(pts)
        f = ball_indicator((0, 0), 1)
        for eps in (1 / 4, 1 / 16, 1 / 50):
            low = riemann_sum(f, sub, eps).real
            mid = riemann_sum(f, IntegerPointSet(2, "prim"), eps).real
            high = riemann_sum(f, IntegerPointSet(2), eps).real
            assert low <= mid <= high

    def test_thread_count_invariance(self, monkeypatch):
        f = ball_indicator((0.1, 0.0), 1)
        src = IntegerPointSet(2, "prim", twist=(Fraction(1, 3), Fraction(1, 5)))
        values = []
        for n in ("1", "2", "5"):
            monkeypatch.setenv("RIEMANNSUM_NUM_THREADS", n)
            values.append(riemann_sum(f, src, 0.004))
        assert values[0] == values[1] == values[2]

    @settings(max_examples=40, deadline=None)
    @given(st.integers(-5, 5), st.integers(-5, 5), st.integers(0, 6), st.integers(0, 6),
           st.integers(2, 12))
    @example(0, 0, 2, 3, 2)  # corner exactly on the enumeration radius
    def test_box_float_matches_exact(self, a, b, w, h, k):
        f = box_indicator((a, b), (a + w, b + h))
        eps = Fraction(1, k)
        exact = riemann_sum(f, IntegerPointSet(2), eps, exact=True)
        # a single-point box has support radius 0, which is the empty sum by contract
        expected = 0 if w == h == 0 else (w * k + 1) * (h * k + 1) * eps * eps
        assert exact == expected
        assert riemann_sum(f, IntegerPointSet(2), float(eps)).real == pytest.approx(
            float(exact), rel=1e-13)


class TestPartitionAndIntegral:
    def test_unit_box_center(self):
        v = partition_riemann_sum(box_indicator((0, 0), (1, 1)), 2 ** -6, "center")
        assert abs(v - 1) <= 2 ** -5

    def test_sector(self):
        v = partition_riemann_sum(sector_indicator(0, 1, 1), 2 ** -8, "center")
        assert abs(v - math.pi / 8) <= 1e-2

    def test_bump_1d_against_adaptive_quadrature(self):
        f = smooth_bump((0.0,), 1.0)
        ref, _ = integrate.quad(lambda x: math.exp(-1 / (1 - x * x)), -1, 1,
                                epsabs=1e-14, epsrel=1e-14)
        assert partition_riemann_sum(f, 2 ** -10, "center") == pytest.approx(ref, abs=1e-6)

    def test_exact_integrals(self):
        assert integral(box_indicator((0, 0), (1, 2))) == 2
        assert integral(sector_indicator(0, 1, 1)) == pytest.approx(math.pi / 8, rel=1e-15)

    def test_bump_integral_two_resolutions(self):
        f = smooth_bump((0.0, 0.0), 1.0)
        v = integral(f)
        a = partition_riemann_sum(f, 2 ** -9, "center")
        b = partition_riemann_sum(f, 2 ** -10, "center")
        assert abs(a - b) < 1e-6
        assert v == pytest.approx(b, abs=1e-6)


class TestDensity:
    def test_unit_lattice_box(self):
        est = estimate_density(box_indicator((0, 0), (1, 1)), IntegerPointSet(2), [0.1, 0.01, 0.001])
        assert est.extrapolated.real == pytest.approx(1.0, abs=2e-3)

    def test_prim_ball(self):
        est = estimate_density(ball_indicator((0, 0), 1), IntegerPointSet(2, "prim"),
                               default_schedule(1e-3))
        assert abs(est.extrapolated.real / (6 / math.pi ** 2) - 1) < 0.01
        assert est.error_estimate < 1e-3

    def test_prim_star_ball(self):
        est = estimate_density(ball_indicator((0, 0), 1), IntegerPointSet(2, "prim_star"),
                               default_schedule(2 ** -9))
        assert abs(est.extrapolated.real / (4 / math.pi ** 2) - 1) < 0.01

    def test_zero_integral_rejected(self):
        f = box_indicator((0, 0), (1, 1))
        with pytest.raises(ValueError, match="zero integral"):
            estimate_density(combination([(1, f), (-1, f)]), IntegerPointSet(2), [0.1, 0.05])

    def test_schedule(self):
        s = default_schedule()
        assert s[0] == 2 ** -4 and s[-1] == 2 ** -12 and len(s) == 9
        assert default_schedule(1e-3)[-1] == 1e-3
        with pytest.raises(ValueError):
            estimate_density(ball_indicator((0, 0), 1), IntegerPointSet(2), [0.1, 0.2])

    def test_fit_intercept_recovers_line(self):
        eps = [0.4, 0.2, 0.1]
        assert fit_intercept(eps, [3 + 2 * e for e in eps]) == pytest.approx(3)


class TestDelone:
    def test_unit_lattice(self):
        rep = delone_check(IntegerPointSet(2), 1.0, 0.4, ((-10, -10), (10, 10)))
        assert rep.relatively_dense and rep.uniformly_discrete

    def test_unit_lattice_not_discrete_at_06(self):
        rep = delone_check(IntegerPointSet(2), 1.0, 0.6, ((-10, -10), (10, 10)))
        assert not rep.uniformly_discrete

    def test_primitive_points(self):
        rep = delone_check(IntegerPointSet(2, "prim"), 2.0, 0.4, ((-50, -50), (50, 50)))
        assert rep.relatively_dense and rep.uniformly_discrete

    def test_density_bounds_bracket_limit(self):
        c1, c2 = delone_density_bounds(IntegerPointSet(2, "prim"), ((-50, -50), (50, 50)))
        assert c1 <= 6 / math.pi ** 2 <= c2
