import math

import numpy as np
import pytest

from dysthe.evolve import (
    BlowUpError,
    Controls,
    diagnostics,
    etdrk4_step,
    evolve,
    linear_propagate,
    mass,
    strang_step,
)
from dysthe.models import assemble
from dysthe.spectral import FieldState, field_from_function, l2_norm, make_grid
from dysthe.symbols import w_symbol
from dysthe.transforms import time_reversal
from dysthe.studies import reversed_coefficients


def box(n=32, L=2 * np.pi):
    return make_grid(n, n, L, L)


def packet(grid, amplitude=1.0):
    x, y = grid.mesh()
    return FieldState(grid, amplitude * np.exp(-(x**2 + y**2) / 2) * (1 + 0.2j * x))


class TestLinear:
    def test_plane_wave_phase(self):
        g = box(64)
        spec = assemble("normalized", g)
        u = field_from_function(g, lambda x, y: np.exp(1j * (3 * x + 2 * y)))
        t = 0.37
        out = linear_propagate(u, spec, t).physical().values
        expected = np.exp(1j * t * w_symbol(3.0, 2.0)) * u.values
        assert np.abs(out - expected).max() / np.abs(expected).max() < 1e-13

    def test_identity_and_group_law(self):
        g = box(32)
        spec = assemble("normalized", g)
        u = packet(g)
        np.testing.assert_allclose(linear_propagate(u, spec, 0.0).physical().values, u.values, atol=1e-15)
        two = linear_propagate(linear_propagate(u, spec, 0.3), spec, 0.5)
        one = linear_propagate(u, spec, 0.8)
        np.testing.assert_allclose(two.physical().values, one.physical().values, atol=1e-13)
        assert math.isclose(two.time, 0.8)

    def test_moduli_preserved(self):
        g = box(32)
        spec = assemble("full", g)
        u = packet(g)
        a = np.abs(u.spectral().values)
        b = np.abs(linear_propagate(u, spec, 2.3).spectral().values)
        np.testing.assert_allclose(a, b, atol=1e-14)

    @pytest.mark.parametrize("step", [etdrk4_step, strang_step])
    def test_step_without_nonlinearity(self, step):
        g = box(32)
        spec = assemble("normalized", g, c=(0, 0, 0, 0))
        u = packet(g)
        a = step(u, spec, 0.01).physical().values
        b = linear_propagate(u, spec, 0.01).physical().values
        np.testing.assert_allclose(a, b, atol=1e-12)

    def test_linear_run_matches_propagator_at_snapshots(self):
        g = box(32)
        spec = assemble("normalized", g, c=(0, 0, 0, 0))
        u = packet(g)
        traj = evolve(u, spec, 0.5, Controls(dt=0.01, snapshot_times=(0.1, 0.25, 0.5)))
        for s in traj.snapshots:
            ref = linear_propagate(u, spec, s.time).physical().values
            np.testing.assert_allclose(s.physical().values, ref, atol=1e-12)

    def test_forward_then_backward(self):
        g = box(32)
        spec = assemble("normalized", g, c=(0, 0, 0, 0))
        u = packet(g)
        end = evolve(u, spec, 0.5, Controls(dt=0.01)).final
        back = evolve(time_reversal(end), spec, 0.5, Controls(dt=0.01)).final
        np.testing.assert_allclose(time_reversal(back).physical().values, u.values, atol=1e-12)


class TestSteps:
    @pytest.mark.parametrize("step", [etdrk4_step, strang_step])
    def test_zero_field(self, step):
        g = box(16)
        u = FieldState(g, np.zeros(g.shape, dtype=complex))
        assert np.all(step(u, assemble("normalized", g), 0.01).physical().values == 0)

    @pytest.mark.parametrize("dt", [0.0, -0.1])
    def test_bad_dt(self, dt):
        g = box(16)
        with pytest.raises(ValueError):
            etdrk4_step(packet(g), assemble("normalized", g), dt)

    def test_nan_is_reported(self):
        g = box(16)
        u = packet(g)
        bad = u.with_values(np.where(np.abs(u.values) > 0.5, np.nan, u.values))
        with pytest.raises(BlowUpError):
            etdrk4_step(bad, assemble("normalized", g), 0.01)

    def test_integrators_agree_as_dt_shrinks(self):
        g = box(32, 20.0)
        spec = assemble("normalized", g)
        u = packet(g, 0.5)
        gaps = []
        for dt in (0.02, 0.01):
            a = evolve(u, spec, 0.2, Controls(dt=dt)).final.physical().values
            b = evolve(u, spec, 0.2, Controls(dt=dt, integrator="strang")).final.physical().values
            gaps.append(np.abs(a - b).max())
        assert gaps[1] < 0.4 * gaps[0]


class TestEvolve:
    def test_mass_examples(self):
        g = box(16)
        A = 0.5 + 0.5j
        u = FieldState(g, np.full(g.shape, A))
        assert math.isclose(mass(u), (2 * np.pi) ** 2 * abs(A) ** 2, rel_tol=1e-14)
        v = packet(g)
        assert math.isclose(mass(v), mass(v.spectral()), rel_tol=1e-12)

    def test_small_data_mass_drift(self):
        g = box(64, 20.0)
        spec = assemble("normalized", g)
        u0 = packet(g)
        u0 = u0.with_values(u0.values * 0.1 / l2_norm(u0))
        traj = evolve(u0, spec, 1.0, Controls(dt=0.01, diag_every=10))
        m = traj.column("mass")
        assert len(m) == 11
        assert np.max(np.abs(m / m[0] - 1)) < 1e-8

    def test_snapshots_and_diagnostics(self):
        g = box(16)
        spec = assemble("normalized", g)
        traj = evolve(packet(g), spec, 0.1, Controls(dt=0.01, snapshot_times=(0.05, 0.1), diag_every=3))
        assert np.allclose(traj.times, [0.05, 0.1])
        assert traj.snapshot_at(0.05).time == pytest.approx(0.05)
        with pytest.raises(KeyError):
            traj.snapshot_at(0.07)
        np.testing.assert_allclose(traj.column("t"), [0, 0.03, 0.06, 0.09, 0.1])
        assert set(diagnostics(packet(g))) == {"t", "mass", "h1_norm", "edge_mass"}

    def test_deterministic(self):
        g = box(16)
        spec = assemble("normalized", g)
        a = evolve(packet(g), spec, 0.1, Controls(dt=0.01)).final.physical().values
        b = evolve(packet(g), spec, 0.1, Controls(dt=0.01)).final.physical().values
        assert np.array_equal(a, b)

    @pytest.mark.parametrize("T,times", [(0.105, ()), (-1.0, ()), (0.1, (0.055,))])
    def test_bad_lattice(self, T, times):
        g = box(16)
        with pytest.raises(ValueError):
            evolve(packet(g), assemble("normalized", g), T, Controls(dt=0.01, snapshot_times=times))

    @pytest.mark.parametrize("kw", [{"dt": 0.0}, {"integrator": "euler"}, {"diag_every": -1}])
    def test_bad_controls(self, kw):
        with pytest.raises(ValueError):
            Controls(**kw)

    def test_blow_up_keeps_last_state(self):
        g = box(16)
        spec = assemble("normalized", g, c=(1.0, 0, 0, 0))
        # a real c1 turns the cubic term into a source and the mass grows without bound
        u0 = packet(g, 3.0)
        with pytest.raises(BlowUpError) as info:
            evolve(u0, spec, 5.0, Controls(dt=0.01))
        last = info.value.last_state
        assert np.all(np.isfinite(last.physical().values))
        assert last.time > 0

    def test_reversed_equation(self):
        g = box(64, 20.0)
        c = np.array([0.3 - 0.5j, -1.0 + 0.2j, 0.7, 0.1 + 0.4j])
        spec = assemble("normalized", g, c=c)
        u0 = packet(g)
        uT = evolve(u0, spec, 0.2, Controls(dt=0.005)).final
        back = evolve(time_reversal(uT), spec.with_coefficients(reversed_coefficients(c)), 0.2,
                      Controls(dt=0.005)).final
        assert np.abs(back.physical().values - time_reversal(u0).physical().values).max() < 1e-9
