"""Numerical experiments that check the exact symmetries and the measured constants.

Each study builds its own grid and data, runs the solver and returns plain
numbers, so the same code backs the CLI subcommands and the test-suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .airy1d import assemble_1d, dispersion_coefficients, kernel_error
from .config import gaussian
from .estimates import ScatteringProfile, scattering_profile, strichartz_ratio
from .evolve import Controls, evolve, mass
from .models import DYSTHE_C, assemble
from .spectral import FieldState, edge_mass, l2_norm, make_grid, make_grid_1d
from .symbols import DispersionParams
from .transforms import (
    apply_cov,
    cov_coefficients,
    remap_nonlinear_coeffs,
    scale_field,
    time_reversal,
)


def l2_distance(a: FieldState, b: FieldState) -> float:
    return float(np.sqrt(a.grid.cell * np.sum(np.abs(a.physical().values - b.physical().values) ** 2)))


def _gaussian_with_norm(grid, norm: float, sigma: float = 1.0, carrier=(0.0, 0.0)) -> FieldState:
    u = gaussian(grid, 1.0, sigma, carrier=carrier)
    return u.with_values(u.values * (norm / l2_norm(u)))


# ---------------------------------------------------------------------------
# conservation and integrator order


def mass_drift(n: int = 128, L: float = 40.0, norm: float = 0.1, dt: float = 1e-3, T: float = 1.0,
               c=DYSTHE_C, integrator: str = "etdrk4") -> float:
    """Largest relative mass change along a normalized run from a Gaussian."""
    spec = assemble("normalized", make_grid(n, n, L, L), c=c)
    u0 = _gaussian_with_norm(spec.grid, norm, sigma=2.0)
    traj = evolve(u0, spec, T, Controls(dt=dt, integrator=integrator, diag_every=max(1, int(round(0.1 / dt)))))
    m = traj.column("mass")
    return float(np.max(np.abs(m / m[0] - 1.0)))


@dataclass(frozen=True)
class OrderStudy:
    integrator: str
    dts: tuple
    errors: np.ndarray

    @property
    def orders(self) -> np.ndarray:
        return np.log(self.errors[:-1] / self.errors[1:]) / np.log(np.array(self.dts[:-1]) / np.array(self.dts[1:]))

    @property
    def order(self) -> float:
        """Least-squares slope of log error against log dt."""
        return float(np.polyfit(np.log(self.dts), np.log(self.errors), 1)[0])


def order_study(integrator: str, dts=(4e-3, 2e-3, 1e-3), dt_ref: float = 2.5e-4, T: float = 0.2,
                n: int = 64, L: float = 20.0, amplitude: float = 1.0, reference=None) -> OrderStudy:
    """Errors at each dt against a fine ETDRK4 reference run of the same problem."""
    spec = assemble("normalized", make_grid(n, n, L, L))
    u0 = gaussian(spec.grid, amplitude, 1.0)
    if reference is None:
        reference = evolve(u0, spec, T, Controls(dt=dt_ref)).final
    errors = [l2_distance(evolve(u0, spec, T, Controls(dt=dt, integrator=integrator)).final, reference)
              for dt in dts]
    return OrderStudy(integrator, tuple(dts), np.array(errors))


# ---------------------------------------------------------------------------
# symmetries


def cov_equivalence(alpha, c=(0.1, 0.1, -0.1, 0.1), n: int = 128, L: float = 12 * np.pi,
                    dt: float = 5e-4, T: float = 0.5, samples: int = 10) -> float:
    """sup over sample times of ||T(v(s)) - u(alpha1 s)||, v and u run independently.

    ``dt`` and ``T`` refer to the normalized (u) clock; v runs with dt / alpha1.
    """
    d = DispersionParams(*alpha)
    if d.alpha1 <= 0:
        raise ValueError("the comparison runs forward in time, alpha1 must be positive")
    cc = cov_coefficients(d)
    grid = make_grid(n, n, L, L)
    spec_v = assemble("general", grid, alpha=tuple(alpha), c=c)
    spec_u = assemble("normalized", grid, c=remap_nonlinear_coeffs(c, cc.a2, d.alpha1))
    x, y = grid.mesh()
    v0 = FieldState(grid, np.exp(-(x**2 + y**2) / 4) * (1 + 0.3j * x), "physical")
    times_u = [T * k / samples for k in range(samples + 1)]
    tv = evolve(v0, spec_v, T / d.alpha1,
                Controls(dt=dt / d.alpha1, snapshot_times=tuple(t / d.alpha1 for t in times_u)))
    tu = evolve(apply_cov(v0, d), spec_u, T, Controls(dt=dt, snapshot_times=tuple(times_u)))
    return max(l2_distance(apply_cov(a, d), b) for a, b in zip(tv.snapshots, tu.snapshots))


def scaling_commutation(lam: float = 2.0, c=(0.0, -6.0, 1.0, 2j), n: int = 128, L: float = 40.0,
                        dt: float = 4e-3, T: float = 0.4, norm: float = 1.0) -> float:
    """||(S_T u0)_lam - S_{T/lam^3} (u0)_lam|| for a model without the cubic term."""
    if c[0] != 0:
        raise ValueError("the scaling symmetry needs c1 = 0")
    spec = assemble("normalized", make_grid(n, n, L, L), c=c)
    u0 = _gaussian_with_norm(spec.grid, norm, sigma=2.0)
    direct = scale_field(evolve(u0, spec, T, Controls(dt=dt)).final, lam)
    small = assemble("normalized", spec.grid.scaled(lam), c=c)
    other = evolve(scale_field(u0, lam), small, T / lam**3, Controls(dt=dt / lam**3)).final
    return l2_distance(direct, other)


def reversed_coefficients(c) -> np.ndarray:
    """Coefficients solved by I(u) when u solves the normalized equation with c."""
    c = np.asarray(c, dtype=complex)
    return np.array([-np.conj(c[0]), np.conj(c[1]), np.conj(c[2]), -np.conj(c[3])])


def time_reversal_check(c=DYSTHE_C, n: int = 128, L: float = 40.0, dt: float = 2e-3, T: float = 0.4,
                        norm: float = 1.0) -> float:
    """Run u forward to T, reverse it, run the reversed equation for T, compare with I(u0)."""
    spec = assemble("normalized", make_grid(n, n, L, L), c=c)
    u0 = _gaussian_with_norm(spec.grid, norm, sigma=2.0)
    uT = evolve(u0, spec, T, Controls(dt=dt)).final
    back = spec.with_coefficients(reversed_coefficients(c))
    end = evolve(time_reversal(uT), back, T, Controls(dt=dt)).final
    return l2_distance(end, time_reversal(u0))


# ---------------------------------------------------------------------------
# estimates


def strichartz_refinement(n_values=(128, 256), L: float = 12 * np.pi, T_window: float = 0.5,
                          nt: int = 65, sigma: float = 1.0) -> list[float]:
    out = []
    for n in n_values:
        grid = make_grid(n, n, L, L)
        out.append(strichartz_ratio(gaussian(grid, 1.0, sigma), T_window, nt))
    return out


def strichartz_scaling(lam: float = 2.0, n: int = 128, L: float = 12 * np.pi, T_window: float = 0.5,
                       nt: int = 65, sigma: float = 1.0) -> tuple[float, float]:
    grid = make_grid(n, n, L, L)
    phi0 = gaussian(grid, 1.0, sigma)
    return (strichartz_ratio(phi0, T_window, nt),
            strichartz_ratio(scale_field(phi0, lam), T_window / lam**3, nt))


# ---------------------------------------------------------------------------
# scattering


@dataclass(frozen=True)
class ScatteringRun:
    profile: ScatteringProfile
    edge_masses: np.ndarray
    mass0: float


def scattering_run(delta: float = 0.01, sigma: float = 2.0, carrier: float = 2.0,
                   c=(0.0, 1.0, 1.0, 1j), times=(1.0, 2.0, 4.0, 8.0), n: int = 600,
                   L: float = 600.0, dt: float = 0.05) -> ScatteringRun:
    """Pullback differences of a small Gaussian packet with carrier (carrier, 0).

    The run is carried out in the frame of the packet: by the change of
    variables this is the alpha-model with alpha = (1, 3 carrier, 0) started
    from the centred Gaussian; the frame shifts c1 by i a2 (c2 - c3), which
    vanishes for the default c2 = c3.  Distances between pullbacks are the
    same in both frames.
    """

    c = np.asarray(c, dtype=complex)
    alpha = (1.0, 3.0 * carrier, 0.0)
    grid = make_grid(n, n, L, L)
    frame_c = c.copy()
    frame_c[0] = c[0] + 1j * cov_coefficients(DispersionParams(*alpha)).a2 * (c[1] - c[2])
    spec = assemble("general", grid, alpha=alpha, c=frame_c)
    u0 = gaussian(grid, delta, sigma)
    traj = evolve(u0, spec, max(times), Controls(dt=dt, snapshot_times=tuple(times)))
    profile = scattering_profile(traj, spec)
    return ScatteringRun(profile, np.array([edge_mass(s) for s in traj.snapshots]), mass(u0))


# ---------------------------------------------------------------------------
# Airy kernel


def airy_refinement(n_values=(4096, 8192), L: float = 580.0, t: float = 1.0, sigma: float = 1.0,
                    carrier: float = 0.5, omega0: float = 1.0, k0: float = 1.0) -> list[float]:
    """Relative gap between kernel quadrature and spectral propagation per grid size."""
    alpha, beta = dispersion_coefficients(omega0, k0)
    out = []
    for n in n_values:
        grid = make_grid_1d(n, L)
        spec = assemble_1d(grid, omega0=omega0, k0=k0, c=(0, 0, 0, 0))
        u0 = gaussian(grid, 1.0, sigma, carrier=(carrier, 0.0))
        out.append(kernel_error(u0, spec, t, alpha, beta))
    return out
