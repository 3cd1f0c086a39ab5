import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dysthe.spectral import (
    FieldState,
    GridError,
    RepresentationError,
    SpaceTimeField,
    check_dyadic,
    dealias,
    dealias_mask,
    dyadic_cover,
    dyadic_weight,
    edge_mass,
    eta,
    field_from_function,
    free_wave_field,
    l2_norm,
    lp_project,
    make_grid,
    make_grid_1d,
    mixed_norm,
    modulation_project,
    phi,
    sobolev_norm,
    spectral_transform,
    streamed_mixed_norm,
    xsb_norm,
    zero_nyquist,
)
from dysthe.symbols import w_symbol


def random_field(grid, seed=0):
    rng = np.random.default_rng(seed)
    return FieldState(grid, rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))


class TestGrid:
    def test_lattice(self):
        g = make_grid(16, 8, 2 * np.pi, 4 * np.pi)
        assert g.shape == (16, 8)
        assert g.dims == 2
        np.testing.assert_allclose(g.xi[:3], [0, 1, 2])
        np.testing.assert_allclose(g.mu[:3], [0, 0.5, 1.0])
        assert g.xi[8] == -8
        assert g.x[0] == -np.pi
        assert math.isclose(g.cell, (2 * np.pi / 16) * (4 * np.pi / 8))

    @pytest.mark.parametrize("n", [7, 6, 0, -8, 9.5])
    def test_bad_counts(self, n):
        with pytest.raises(GridError):
            make_grid(n, 16, 1.0, 1.0)

    @pytest.mark.parametrize("L", [0.0, -1.0, float("inf"), float("nan")])
    def test_bad_lengths(self, L):
        with pytest.raises(GridError):
            make_grid(16, 16, L, 1.0)

    def test_line_grid(self):
        g = make_grid_1d(32, 10.0)
        assert g.dims == 1 and g.shape == (32, 1)
        assert np.all(g.mu == 0)

    def test_scaled(self):
        g = make_grid(16, 16, 8.0, 8.0).scaled(2.0)
        assert (g.Lx, g.Ly, g.nx) == (4.0, 4.0, 16)

    def test_nyquist_mask(self):
        g = make_grid(8, 8, 1.0, 1.0)
        m = g.nyquist_mask()
        assert m[4].all() and m[:, 4].all()
        assert m.sum() == 15


class TestTransforms:
    def test_roundtrip(self):
        g = make_grid(32, 16, 3.0, 5.0)
        f = random_field(g)
        back = spectral_transform(spectral_transform(f, "to_spectral"), "to_physical")
        np.testing.assert_allclose(back.values, f.values, atol=1e-12)

    def test_parseval(self):
        g = make_grid(32, 32, 3.0, 5.0)
        f = random_field(g, 3)
        assert math.isclose(l2_norm(f), l2_norm(f.spectral()), rel_tol=1e-12)

    def test_constant_goes_to_zero_mode(self):
        g = make_grid(16, 16, 2 * np.pi, 2 * np.pi)
        hat = FieldState(g, np.full(g.shape, 2.0 + 0j)).spectral().values
        assert math.isclose(hat[0, 0].real, 2.0 * 16)
        assert np.abs(hat).sum() - abs(hat[0, 0]) < 1e-12

    def test_plane_wave_lands_on_its_mode(self):
        g = make_grid(16, 16, 2 * np.pi, 2 * np.pi)
        f = field_from_function(g, lambda x, y: np.exp(1j * (3 * x - 2 * y)))
        hat = np.abs(f.spectral().values)
        assert np.unravel_index(hat.argmax(), hat.shape) == (3, 14)

    def test_wrong_direction(self):
        g = make_grid(8, 8, 1.0, 1.0)
        f = random_field(g)
        with pytest.raises(RepresentationError):
            spectral_transform(f, "to_physical")
        with pytest.raises(RepresentationError):
            spectral_transform(f.spectral(), "to_spectral")

    def test_zero_nyquist(self):
        g = make_grid(8, 8, 1.0, 1.0)
        out = zero_nyquist(random_field(g)).values
        assert np.all(out[g.nyquist_mask()] == 0)


class TestCutoffs:
    def test_eta_plateau_and_support(self):
        assert eta(0.0) == 1.0 and eta(1.25) == 1.0
        assert eta(1.6) == 0.0 and eta(3.0) == 0.0
        assert 0 < eta(1.4) < 1
        r = np.linspace(0, 2, 401)
        assert np.all(np.diff(eta(r)) <= 0)

    def test_phi_support(self):
        assert phi(0.3) == 0.0
        assert phi(1.0) == 1.0
        assert phi(1.7) == 0.0

    def test_partition_of_unity(self):
        r = np.linspace(0, 100, 5001)
        total = sum(dyadic_weight(r, N) for N in dyadic_cover(r.max()))
        np.testing.assert_allclose(total, 1.0, atol=1e-14)

    @pytest.mark.parametrize("N", [3, 0.5, 0, "x", 6])
    def test_not_dyadic(self, N):
        with pytest.raises(ValueError):
            check_dyadic(N)

    def test_dyadic(self):
        assert check_dyadic(1) == 0 and check_dyadic(64) == 6

    def test_projectors_sum_to_identity(self):
        g = make_grid(64, 64, 2 * np.pi, 2 * np.pi)
        f = random_field(g, 5)
        total = sum(lp_project(f, N).values for N in dyadic_cover(g.kmod().max()))
        np.testing.assert_allclose(total, f.values, atol=1e-12)

    def test_projection_keeps_plateau_mode(self):
        g = make_grid(64, 64, 2 * np.pi, 2 * np.pi)
        f = field_from_function(g, lambda x, y: np.exp(8j * x))
        np.testing.assert_allclose(lp_project(f, 8).values, f.values, atol=1e-12)
        np.testing.assert_allclose(lp_project(f, 16).values, 0, atol=1e-12)


class TestNorms:
    def test_l2_of_constant(self):
        g = make_grid(16, 16, 2 * np.pi, 2 * np.pi)
        f = FieldState(g, np.full(g.shape, 3.0 + 0j))
        assert math.isclose(l2_norm(f), 3.0 * 2 * np.pi, rel_tol=1e-14)

    def test_sobolev_of_plane_wave(self):
        g = make_grid(32, 32, 2 * np.pi, 2 * np.pi)
        f = field_from_function(g, lambda x, y: np.exp(1j * (3 * x + 4 * y)))
        assert math.isclose(sobolev_norm(f, 1.0), np.sqrt(26.0) * 2 * np.pi, rel_tol=1e-12)
        assert math.isclose(sobolev_norm(f, 0.0), l2_norm(f), rel_tol=1e-12)

    def test_mixed_norm_of_constant_in_time(self):
        g = make_grid(16, 16, 2 * np.pi, 2 * np.pi)
        vals = np.ones((8, 16, 16), dtype=complex)
        F = SpaceTimeField(g, vals, dt=0.25)
        # ||1||_{L^4_t L^2_x} = (T * (4 pi^2)^2)^(1/4) over the periodic window T = 2
        assert math.isclose(mixed_norm(F, 4, 2), (2.0 * (4 * np.pi**2) ** 2) ** 0.25, rel_tol=1e-12)

    def test_streamed_matches_trapezoid(self):
        g = make_grid(16, 16, 1.0, 1.0)
        slices = [np.full(g.shape, t + 1.0, dtype=complex) for t in range(3)]
        value = streamed_mixed_norm(slices, 2, 2, g.cell, 0.5)
        assert math.isclose(value, np.sqrt(0.25 * 1 + 0.5 * 4 + 0.25 * 9), rel_tol=1e-12)

    def test_rejects_small_exponent(self):
        g = make_grid(8, 8, 1.0, 1.0)
        with pytest.raises(ValueError):
            mixed_norm(random_field(g), 0.5, 2)

    def test_xsb_equals_l2_on_plateau_data(self):
        # modes with |k| a power of two and a modulation that is 0 or a power of two
        g = make_grid(32, 32, 2 * np.pi, 2 * np.pi)
        nt = 64
        dt = 2 * np.pi / nt
        t = dt * np.arange(nt)
        x, y = g.mesh()
        vals = np.zeros((nt,) + g.shape, dtype=complex)
        for (kx, ky, shift) in [(4, 0, 0), (0, 8, 2), (2, 0, 4)]:
            w = w_symbol(kx, ky)
            vals += np.exp(1j * (kx * x + ky * y))[None] * np.exp(1j * (w + shift) * t)[:, None, None]
        F = SpaceTimeField(g, vals, dt)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            assert math.isclose(xsb_norm(F, 0, 0), mixed_norm(F, 2, 2), rel_tol=1e-12)
            # s = 1 weights each piece by N^2
            expected = np.sqrt(sum(N**2 for N in (4, 8, 2)) / 3) * mixed_norm(F, 2, 2)
            assert math.isclose(xsb_norm(F, 1, 0), expected, rel_tol=1e-12)

    def test_free_wave_lives_at_zero_modulation(self):
        g = make_grid(16, 16, 2 * np.pi, 2 * np.pi)
        f = field_from_function(g, lambda x, y: np.exp(2j * x))
        nt = 32
        dt = 2 * np.pi / nt
        F = SpaceTimeField(g, free_wave_field(f, dt * np.arange(nt)), dt)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            q1 = modulation_project(F, 1)
            q2 = modulation_project(F, 2)
        np.testing.assert_allclose(q1.values, F.values, atol=1e-12)
        np.testing.assert_allclose(q2.values, 0, atol=1e-12)


class TestDealiasing:
    def test_mask_two_thirds(self):
        g = make_grid(12, 12, 1.0, 1.0)
        m = dealias_mask(g)
        assert m[4, 0] and not m[5, 0] and m[0, 8]

    def test_requires_spectral(self):
        g = make_grid(8, 8, 1.0, 1.0)
        with pytest.raises(RepresentationError):
            dealias(random_field(g))

    def test_edge_mass(self):
        g = make_grid(64, 64, 40.0, 40.0)
        inside = field_from_function(g, lambda x, y: np.exp(-(x**2 + y**2)))
        assert edge_mass(inside) < 1e-30
        flat = FieldState(g, np.ones(g.shape, dtype=complex))
        # the central window |x|, |y| <= 10 holds 33 x 33 of the samples
        assert math.isclose(edge_mass(flat), g.cell * (64**2 - 33**2), rel_tol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([8, 16, 32]), st.floats(0.5, 20.0))
def test_roundtrip_property(seed, n, L):
    g = make_grid(n, n, L, L)
    f = random_field(g, seed)
    back = f.spectral().physical()
    np.testing.assert_allclose(back.values, f.values, atol=1e-12)
    assert math.isclose(l2_norm(f), l2_norm(f.spectral()), rel_tol=1e-12)
