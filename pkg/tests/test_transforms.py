import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dysthe.spectral import FieldState, field_from_function, l2_norm, make_grid, sobolev_norm
from dysthe.symbols import DispersionParams
from dysthe.transforms import (
    apply_cov,
    apply_cov_inverse,
    cov_coefficients,
    remap_nonlinear_coeffs,
    scale_field,
    time_reversal,
)


def box(n=32, L=2 * np.pi):
    return make_grid(n, n, L, L)


def bump(grid, t=0.0):
    x, y = grid.mesh()
    return FieldState(grid, np.exp(-(x**2 + 2 * y**2) / 2) * (1 + 0.3j * x + 0.1 * y), "physical", t)


class TestCovCoefficients:
    def test_identity(self):
        cc = cov_coefficients(DispersionParams(1.0, 0.0, 0.0))
        assert (cc.a1, cc.a2, cc.a3) == (0.0, 0.0, 0.0)

    def test_hand_value(self):
        cc = cov_coefficients(DispersionParams(1.0, 3.0, 0.0))
        assert (cc.a1, cc.a2, cc.a3) == pytest.approx((3.0, 1.0, 2.0), abs=1e-15)
        assert cc.theta == pytest.approx(1.0)

    def test_alpha1_zero(self):
        with pytest.raises(ValueError):
            cov_coefficients(DispersionParams(0.0, 1.0, 1.0))

    @settings(max_examples=100)
    @given(st.floats(0.2, 5), st.floats(-5, 5), st.floats(-5, 5))
    def test_symbols_differ_by_a_linear_frequency(self, a1, a2, a3):
        # omega_alpha(xi - a2', mu) equals alpha1 (w - a1' xi) up to a constant
        cc = cov_coefficients(DispersionParams(a1, a2, a3))
        xi = np.linspace(-3, 3, 7)[:, None]
        mu = np.linspace(-2, 2, 5)[None, :]
        s = xi - cc.a2
        omega = a1 * (s**3 - 3 * s * mu**2) + a2 * (s**2 - mu**2) - a3 * s
        target = a1 * (xi**3 - 3 * xi * mu**2 - cc.a1 * xi)
        diff = omega - target
        scale = 1 + abs(a1) + abs(a2) ** 3 + abs(a3) ** 2
        assert np.ptp(diff) < 1e-10 * scale * 30


class TestApplyCov:
    def test_identity_map(self):
        v = bump(box(), 0.7)
        u = apply_cov(v, DispersionParams(1.0, 0.0, 0.0))
        np.testing.assert_allclose(u.values, v.values, atol=1e-14)
        assert u.time == 0.7

    def test_pure_shift(self):
        g = box(64)
        t = 0.5
        v = field_from_function(g, lambda x, y: np.exp(1j * (2 * x + y)) + np.cos(x))
        v = FieldState(g, v.values, "physical", t)
        u = apply_cov(v, DispersionParams(1.0, 0.0, 1.0))
        x, y = g.mesh()
        expected = np.exp(1j * (2 * (x + t) + y)) + np.cos(x + t)
        np.testing.assert_allclose(u.values, expected, atol=1e-13)

    @pytest.mark.parametrize("alpha", [(1.0, 3.0, 0.0), (2.0, 1.0, 1.0), (-1.5, 3.0, 0.4)])
    def test_roundtrip_and_norms(self, alpha):
        g = make_grid(64, 64, 12 * np.pi, 12 * np.pi)
        d = DispersionParams(*alpha)
        v = bump(g, 0.3)
        u = apply_cov(v, d)
        assert u.time == pytest.approx(alpha[0] * 0.3)
        back = apply_cov_inverse(u, d)
        np.testing.assert_allclose(back.values, v.values, atol=1e-12)
        assert back.time == pytest.approx(0.3)
        assert math.isclose(l2_norm(u), l2_norm(v), rel_tol=1e-12)

    def test_sobolev_norm_of_shift_only(self):
        g = box(64, 20.0)
        d = DispersionParams(1.0, 0.0, 2.5)
        v = bump(g, 0.4)
        assert math.isclose(sobolev_norm(apply_cov(v, d), 2.0), sobolev_norm(v, 2.0), rel_tol=1e-12)

    def test_off_lattice(self):
        # a2 = 1/3 does not sit on the lattice of a 2 pi box
        with pytest.raises(ValueError):
            apply_cov(bump(box()), DispersionParams(1.0, 1.0, 0.0))


class TestRemap:
    def test_zero_shift(self):
        c = np.array([1 + 1j, 2, -3j, 0.5])
        np.testing.assert_array_equal(remap_nonlinear_coeffs(c, 0.0), c)

    def test_hand_values(self):
        np.testing.assert_allclose(remap_nonlinear_coeffs((0, 1, 0, 0), 1.0), [-1j, 1, 0, 0])
        np.testing.assert_allclose(remap_nonlinear_coeffs((0, 0, 1, 0), 1.0), [1j, 0, 1, 0])

    def test_time_dilation_factor(self):
        np.testing.assert_allclose(remap_nonlinear_coeffs((2, 4, 6, 8), 0.0, alpha1=2.0), [1, 2, 3, 4])
        with pytest.raises(ValueError):
            remap_nonlinear_coeffs((1, 1, 1, 1), 0.0, alpha1=0.0)


class TestScaling:
    def test_identity(self):
        u = bump(box())
        s = scale_field(u, 1.0)
        assert np.array_equal(s.values, u.values) and s.grid.Lx == u.grid.Lx

    def test_norm_preserved(self):
        u = bump(box(64, 20.0), 0.8)
        s = scale_field(u, 2.0)
        assert math.isclose(l2_norm(s), l2_norm(u), rel_tol=1e-12)
        assert s.time == pytest.approx(0.1)

    def test_gaussian_width(self):
        g = box(64, 40.0)
        sigma, lam = 3.0, 2.0
        u = field_from_function(g, lambda x, y: np.exp(-(x**2 + y**2) / (2 * sigma**2)))
        s = scale_field(u, lam)
        x, y = s.grid.mesh()
        expected = lam * np.exp(-(x**2 + y**2) / (2 * (sigma / lam) ** 2))
        np.testing.assert_allclose(s.values, expected, atol=1e-14)

    @pytest.mark.parametrize("lam", [0.0, -2.0])
    def test_bad_factor(self, lam):
        with pytest.raises(ValueError):
            scale_field(bump(box()), lam)


class TestTimeReversal:
    def test_involution(self):
        u = bump(box(), 0.4)
        twice = time_reversal(time_reversal(u))
        assert np.array_equal(twice.values, u.values) and twice.time == 0.4

    def test_real_even_field_unchanged(self):
        g = box(32, 10.0)
        u = field_from_function(g, lambda x, y: np.exp(-(x**2 + y**2)) + np.cos(x) * np.cos(2 * y))
        np.testing.assert_allclose(time_reversal(u).values, u.values, atol=1e-15)

    def test_plane_wave(self):
        g = box(32)
        u = field_from_function(g, lambda x, y: np.exp(1j * x))
        np.testing.assert_allclose(time_reversal(u).values, u.values, atol=1e-14)

    def test_reflection_of_odd_field(self):
        g = box(32, 10.0)
        u = field_from_function(g, lambda x, y: np.sin(2 * np.pi * x / 10) * np.exp(-(y**2)))
        np.testing.assert_allclose(time_reversal(u).values, -u.values, atol=1e-15)
