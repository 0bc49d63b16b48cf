"""Cylinder-function engine against identities and independent oracles."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings, strategies as st

import oracles as oc
from cylgrating.errors import DomainError, RangeOverflowError
from cylgrating.specfun import bessel_j, bessel_y, cyl_pair, hankel1

# first positive zeros located beforehand by bisection on the series oracles
J0_FIRST_ZERO = 2.4048255576957693
Y0_FIRST_ZERO = 0.8935769662791664


class TestBesselJ:
    def test_order0_at_origin(self):
        assert bessel_j(0, 0.0) == 1.0

    def test_order1_at_origin(self):
        assert bessel_j(1, 0.0) == 0.0

    def test_first_zero_from_series_oracle(self):
        root = oc.bisect_root(lambda t: oc.j_series(0, t), 2.0, 3.0)
        assert root == pytest.approx(J0_FIRST_ZERO, abs=1e-12)
        assert abs(bessel_j(0, J0_FIRST_ZERO)) <= 1e-10

    def test_negative_order_parity(self):
        assert bessel_j(-3, 2.7) == -bessel_j(3, 2.7)
        assert bessel_j(-4, 2.7) == bessel_j(4, 2.7)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            bessel_j(0, -1.0)
        with pytest.raises(DomainError):
            bessel_j(300, 1.0)
        with pytest.raises(DomainError):
            bessel_j(0, float("nan"))
        with pytest.raises(DomainError):
            bessel_j(0, 2.0e4)


class TestBesselY:
    @pytest.mark.parametrize("x", [1.0, 10.0, 100.0])
    def test_wronskian(self, x):
        w = bessel_j(0, x) * 0.5 * (bessel_y(-1, x) - bessel_y(1, x)) \
            - 0.5 * (bessel_j(-1, x) - bessel_j(1, x)) * bessel_y(0, x)
        assert w == pytest.approx(2.0 / (math.pi * x), rel=1e-12)

    def test_large_x_asymptotic_form(self):
        # the bare leading term sqrt(2/(pi x)) sin(x - pi/4) carries an
        # O(1/(8x)) relative defect by itself (8e-4 at x = 500); the stated
        # 1e-6 agreement holds once the standard first correction term of
        # the expansion is kept
        x = 500.0
        chi = x - math.pi / 4.0
        com = math.sqrt(2.0 / (math.pi * x))
        leading = com * math.sin(chi)
        corrected = com * (math.sin(chi) - math.cos(chi) / (8.0 * x))
        assert bessel_y(0, x) == pytest.approx(leading, rel=2e-3)
        assert bessel_y(0, x) == pytest.approx(corrected, rel=1e-6)

    def test_first_zero_from_series_oracle(self):
        root = oc.bisect_root(lambda t: oc.y_series(0, t), 0.5, 1.5)
        assert root == pytest.approx(Y0_FIRST_ZERO, abs=1e-12)
        assert abs(bessel_y(0, Y0_FIRST_ZERO)) <= 1e-10

    def test_strictly_positive_domain(self):
        with pytest.raises(DomainError):
            bessel_y(0, 0.0)

    def test_overflow_is_an_error(self):
        with pytest.raises(RangeOverflowError):
            bessel_y(200, 0.01)


class TestHankel1:
    def test_imag_is_bessel_y(self):
        assert hankel1(4, 3.3).imag == bessel_y(4, 3.3)
        assert hankel1(4, 3.3).real == bessel_j(4, 3.3)

    def test_asymptotic_magnitude(self):
        x = 1000.0
        assert abs(hankel1(0, x)) * math.sqrt(x) == pytest.approx(
            math.sqrt(2.0 / math.pi), rel=1e-4)

    def test_parity(self):
        assert hankel1(-3, 7.3) == -hankel1(3, 7.3)


class TestCylPair:
    def test_j0_derivative_identity(self):
        p = cyl_pair(0, 1.7)
        assert p.jp == -bessel_j(1, 1.7)
        assert p.yp == -bessel_y(1, 1.7)

    def test_wronskian_invariant(self):
        p = cyl_pair(7, 4.1)
        assert p.j * p.yp - p.jp * p.y == pytest.approx(
            2.0 / (math.pi * 4.1), rel=1e-12)

    def test_recurrence_residual_independent_orders(self):
        n, x = 5, 12.0
        for f in (bessel_j, bessel_y):
            lo, mid, hi = f(n - 1, x), f(n, x), f(n + 1, x)
            scale = max(abs(lo), abs(hi), abs(2.0 * n / x * mid))
            assert abs(lo + hi - 2.0 * n / x * mid) <= 1e-10 * scale

    def test_negative_order(self):
        p = cyl_pair(-5, 6.0)
        q = cyl_pair(5, 6.0)
        assert p.j == -q.j and p.jp == -q.jp and p.y == -q.y and p.yp == -q.yp


class TestInvariants:
    @pytest.mark.parametrize("x", [0.1, 1.0, 5.0, 20.0, 100.0, 1000.0])
    def test_wronskian_grid(self, x):
        for n in range(0, 51):
            try:
                p = cyl_pair(n, x)
            except RangeOverflowError:
                pytest.fail(f"unexpected overflow at n={n}, x={x}")
            w = p.j * p.yp - p.jp * p.y
            assert w == pytest.approx(2.0 / (math.pi * x), rel=1e-12), (n, x)
            assert abs(p.h) > 0.0

    @given(n=st.integers(min_value=0, max_value=80),
           x=st.floats(min_value=0.05, max_value=900.0))
    @settings(max_examples=40, deadline=None)
    def test_wronskian_property(self, n, x):
        p = cyl_pair(n, x)
        assert p.j * p.yp - p.jp * p.y == pytest.approx(
            2.0 / (math.pi * x), rel=1e-11)

    @given(n=st.integers(min_value=1, max_value=60),
           x=st.floats(min_value=0.1, max_value=500.0))
    @settings(max_examples=30, deadline=None)
    def test_parity_property(self, n, x):
        sign = -1.0 if n % 2 else 1.0
        assert bessel_j(-n, x) == sign * bessel_j(n, x)
        assert bessel_y(-n, x) == sign * bessel_y(n, x)

    @pytest.mark.parametrize("n", [2, 10, 37, 100])
    @pytest.mark.parametrize("x", [0.3, 7.0, 150.0, 1000.0])
    def test_recurrence_residual_grid(self, n, x):
        for f in (bessel_j, bessel_y):
            lo, mid, hi = f(n - 1, x), f(n, x), f(n + 1, x)
            scale = max(abs(lo), abs(hi), abs(2.0 * n / x * mid), 1e-290)
            assert abs(lo + hi - 2.0 * n / x * mid) <= 1e-10 * scale


class TestOracleAgreement:
    """Brute-force series / asymptotics / quadrature, computed test-side."""

    @pytest.mark.parametrize("n,x", [
        (0, 0.2), (1, 1.0), (2, 3.0), (5, 6.5), (9, 8.0), (25, 4.0), (60, 9.0)])
    def test_series_region(self, n, x):
        assert bessel_j(n, x) == pytest.approx(oc.j_series(n, x), rel=1e-9, abs=1e-280)
        assert bessel_y(n, x) == pytest.approx(oc.y_series(n, x), rel=1e-9)

    @pytest.mark.parametrize("n,x", [
        (0, 14.0), (3, 23.0), (8, 55.0), (17, 31.0), (40, 180.0), (5, 977.0)])
    def test_quadrature_region(self, n, x):
        assert bessel_j(n, x) == pytest.approx(oc.j_quadrature(n, x),
                                               rel=1e-9, abs=1e-13)
        assert bessel_y(n, x) == pytest.approx(oc.y_quadrature(n, x),
                                               rel=1e-9, abs=1e-13)

    @pytest.mark.parametrize("n,x", [(0, 30.0), (1, 64.0), (4, 211.0), (7, 4000.0)])
    def test_asymptotic_region(self, n, x):
        jj, yy = oc.jy_asymptotic(n, x)
        assert bessel_j(n, x) == pytest.approx(jj, rel=1e-9, abs=1e-13)
        assert bessel_y(n, x) == pytest.approx(yy, rel=1e-9, abs=1e-13)

    def test_against_mpmath_spot_values(self):
        mp = pytest.importorskip("mpmath")
        mp.mp.dps = 30
        for n, x in [(0, 0.7), (12, 16.0), (47, 47.0), (3, 2000.0), (128, 20.0)]:
            assert bessel_j(n, x) == pytest.approx(
                float(mp.besselj(n, x)), rel=1e-11, abs=1e-200)
            assert bessel_y(n, x) == pytest.approx(
                float(mp.bessely(n, x)), rel=1e-11)
