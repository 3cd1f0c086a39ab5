"""Time stepping for ``u_t = L u + N(u)`` with diagonal, purely dispersive L.

The state is advanced in spectral representation.  ETDRK4 follows Cox and
Matthews in the Kassam-Trefethen form; its phi-function weights are averaged
over a small contour for modes with |z| < 1 where the direct formulas lose
all their digits to cancellation.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .models import ModelSpec, nonlinear_hat
from .spectral import FieldState, edge_mass, sobolev_norm

INTEGRATORS = ("etdrk4", "strang")
CONTOUR_POINTS = 32

# a run is declared unstable once the mass grows by this factor
BLOWUP_FACTOR = 1e6


class BlowUpError(RuntimeError):
    """Raised when the solution stops being finite; keeps the last good state."""

    def __init__(self, message: str, last_state: FieldState, trajectory: "Trajectory | None" = None):
        super().__init__(message)
        self.last_state = last_state
        self.trajectory = trajectory


@dataclass(frozen=True)
class Controls:
    dt: float = 1e-3
    integrator: str = "etdrk4"
    snapshot_times: tuple = ()
    diag_every: int = 0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"unknown integrator {self.integrator!r}; expected one of {INTEGRATORS}")
        if self.diag_every < 0:
            raise ValueError("diag_every must be >= 0")


@dataclass
class Trajectory:
    snapshots: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    final: FieldState | None = None

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.snapshots])

    def snapshot_at(self, t: float, tol: float = 1e-9) -> FieldState:
        for s in self.snapshots:
            if abs(s.time - t) <= tol * max(1.0, abs(t)):
                return s
        raise KeyError(f"no snapshot at t = {t}")

    def column(self, name: str) -> np.ndarray:
        return np.array([row[name] for row in self.diagnostics])


def mass(u: FieldState) -> float:
    """Integral of |u|^2; the unitary FFT makes it representation independent."""
    return float(u.grid.cell * np.sum(np.abs(u.values) ** 2))


def diagnostics(u: FieldState) -> dict:
    u = u.physical()
    return {
        "t": u.time,
        "mass": mass(u),
        "h1_norm": sobolev_norm(u, 1.0),
        "edge_mass": edge_mass(u),
    }


def linear_propagate(u: FieldState, spec: ModelSpec, t: float) -> FieldState:
    """Exact free flow over time t, per-mode phase rotation."""
    hat = u.spectral().values
    out = u.with_values(np.exp(t * spec.linear_symbol) * hat, "spectral", u.time + t)
    return out if u.representation == "spectral" else out.physical()


# ---------------------------------------------------------------------------
# ETDRK4 weights


def _phi_weights(z: np.ndarray, h: float):
    """Q, f1, f2, f3 of Kassam-Trefethen for z = h * L (elementwise)."""

    def direct(r):
        er = np.exp(r)
        q = h * (np.exp(r / 2) - 1) / r
        f1 = h * (-4 - r + er * (4 - 3 * r + r * r)) / r**3
        f2 = h * (2 + r + er * (r - 2)) / r**3
        f3 = h * (-4 - 3 * r - r * r + er * (4 - r)) / r**3
        return q, f1, f2, f3

    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1.0
    out = [np.empty_like(z) for _ in range(4)]
    if np.any(~small):
        for o, v in zip(out, direct(z[~small])):
            o[~small] = v
    if np.any(small):
        theta = 2 * np.pi * (np.arange(CONTOUR_POINTS) + 0.5) / CONTOUR_POINTS
        r = z[small][:, None] + np.exp(1j * theta)[None, :]
        for o, v in zip(out, direct(r)):
            o[small] = v.mean(axis=1)
    return tuple(out)


@functools.lru_cache(maxsize=32)
def _etdrk4_table(spec: ModelSpec, dt: float):
    z = dt * spec.linear_symbol
    q, f1, f2, f3 = _phi_weights(z, dt)
    return np.exp(z), np.exp(z / 2), q, f1, f2, f3


@functools.lru_cache(maxsize=32)
def _half_propagator(spec: ModelSpec, dt: float):
    return np.exp(0.5 * dt * spec.linear_symbol)


def _etdrk4_hat(hat: np.ndarray, spec: ModelSpec, dt: float) -> np.ndarray:
    e, e2, q, f1, f2, f3 = _etdrk4_table(spec, dt)
    nu = nonlinear_hat(hat, spec)
    a = e2 * hat + q * nu
    na = nonlinear_hat(a, spec)
    b = e2 * hat + q * na
    nb = nonlinear_hat(b, spec)
    c = e2 * a + q * (2 * nb - nu)
    nc = nonlinear_hat(c, spec)
    return e * hat + f1 * nu + 2 * f2 * (na + nb) + f3 * nc


def _strang_hat(hat: np.ndarray, spec: ModelSpec, dt: float) -> np.ndarray:
    half = _half_propagator(spec, dt)
    v = half * hat
    k1 = nonlinear_hat(v, spec)
    k2 = nonlinear_hat(v + 0.5 * dt * k1, spec)
    k3 = nonlinear_hat(v + 0.5 * dt * k2, spec)
    k4 = nonlinear_hat(v + dt * k3, spec)
    v = v + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return half * v


_STEPPERS = {"etdrk4": _etdrk4_hat, "strang": _strang_hat}


def _step(u: FieldState, spec: ModelSpec, dt: float, which: str) -> FieldState:
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    hat = _STEPPERS[which](u.spectral().values, spec, float(dt))
    if not np.all(np.isfinite(hat)):
        raise BlowUpError(f"non-finite values after a step at t = {u.time + dt}", u)
    out = u.with_values(hat, "spectral", u.time + dt)
    return out if u.representation == "spectral" else out.physical()


def etdrk4_step(u: FieldState, spec: ModelSpec, dt: float) -> FieldState:
    return _step(u, spec, dt, "etdrk4")


def strang_step(u: FieldState, spec: ModelSpec, dt: float) -> FieldState:
    """Half linear step, RK4 on the nonlinear part, half linear step."""
    return _step(u, spec, dt, "strang")


def _step_count(T: float, dt: float) -> int:
    n = int(round(T / dt))
    if n < 1 or abs(n * dt - T) > 1e-9 * max(1.0, T):
        raise ValueError(f"T = {T} is not a whole number of steps dt = {dt}")
    return n


def evolve(u0: FieldState, spec: ModelSpec, T: float, controls: Controls | None = None) -> Trajectory:
    """Advance u0 to time u0.time + T with a fixed step.

    Snapshots are taken at the requested absolute times (each must fall on
    the step lattice); diagnostics every ``diag_every`` steps and at the end.
    """
    if not T > 0:
        raise ValueError(f"T must be positive, got {T}")
    controls = controls or Controls()
    dt = controls.dt
    nsteps = _step_count(T, dt)
    t0 = u0.time
    wanted = {}
    for ts in controls.snapshot_times:
        k = int(round((ts - t0) / dt))
        if abs(t0 + k * dt - ts) > 1e-9 * max(1.0, abs(ts)) or not 0 <= k <= nsteps:
            raise ValueError(f"snapshot time {ts} is not on the step lattice of this run")
        wanted[k] = ts
    stepper = _STEPPERS[controls.integrator]

    traj = Trajectory()
    grid = u0.grid
    hat = u0.spectral().values.copy()
    limit = BLOWUP_FACTOR * max(mass(u0), np.finfo(float).tiny)

    def state(k, values):
        t = wanted.get(k, t0 + k * dt)
        return FieldState(grid, values, "spectral", t).physical()

    def record(k, values):
        if k in wanted:
            traj.snapshots.append(state(k, values))
        if controls.diag_every and (k % controls.diag_every == 0 or k == nsteps):
            traj.diagnostics.append(diagnostics(state(k, values)))

    record(0, hat)
    for k in range(1, nsteps + 1):
        new = stepper(hat, spec, dt)
        m = grid.cell * float(np.sum(np.abs(new) ** 2))
        if not math.isfinite(m) or m > limit:
            last = state(k - 1, hat)
            traj.final = last
            raise BlowUpError(f"solution left the stable range at t = {t0 + k * dt:.6g}", last, traj)
        hat = new
        record(k, hat)
    traj.final = state(nsteps, hat)
    return traj
