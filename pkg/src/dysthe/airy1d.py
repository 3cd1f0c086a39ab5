"""One-dimensional Dysthe equation and the Airy kernel of its linear part.

In the frame moving with the group velocity the linear symbol is
``omega(xi) = alpha xi^3 + beta xi^2`` with alpha = -Omega0 / (16 k0^3) and
beta = Omega0 / (8 k0^2).  Completing the cube around xi = -beta / (3 alpha)
gives the fundamental solution

    K(x, t) = |c|^-1 Ai(X / c) exp(i (2 t beta^3 / (27 alpha^2) - x beta / (3 alpha))),
    c = (3 alpha t)^(1/3)  (real cube root, sign kept),  X = x - beta^2 t / (3 alpha),

with the standard Airy function Ai(z) = (1/2pi) int exp(i(s^3/3 + z s)) ds.
"""

from __future__ import annotations

import numpy as np
import scipy.signal
import scipy.special

from .evolve import Controls, Trajectory, evolve, linear_propagate
from .models import ModelSpec, assemble
from .spectral import FieldState, SpectralGrid
from .symbols import coth_symbol_1d


def dispersion_coefficients(omega0: float = 1.0, k0: float = 1.0) -> tuple[float, float]:
    """(alpha, beta) of the comoving linear symbol alpha xi^3 + beta xi^2."""
    return -omega0 / (16 * k0**3), omega0 / (8 * k0**2)


def airy_fundamental(x, t: float, alpha: float, beta: float):
    """Kernel of exp(i t (alpha D^3 + beta D^2)) on the line, D = -i d/dx."""
    if t == 0:
        raise ValueError("the fundamental solution is singular at t = 0")
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    x = np.asarray(x, dtype=float)
    c = np.cbrt(3.0 * alpha * t)
    X = x - beta**2 * t / (3.0 * alpha)
    ai = scipy.special.airy(X / c)[0]
    phase = 2.0 * t * beta**3 / (27.0 * alpha**2) - x * beta / (3.0 * alpha)
    out = ai * np.exp(1j * phase) / abs(c)
    return out[()] if out.ndim == 0 else out


def airy_convolution(u0: FieldState, t: float, alpha: float, beta: float) -> FieldState:
    """Free evolution on the line by direct quadrature against the Airy kernel.

    The samples of u0 are treated as a function on the whole line that
    vanishes outside the box; the result is evaluated at the same points.
    """
    grid = u0.grid
    if grid.dims != 1:
        raise ValueError("airy_convolution works on line grids")
    n, dx = grid.nx, grid.dx
    offsets = dx * np.arange(-(n - 1), n)
    kernel = airy_fundamental(offsets, t, alpha, beta)
    data = u0.physical().values[:, 0]
    full = scipy.signal.fftconvolve(kernel, data, mode="full")
    values = dx * full[n - 1:2 * n - 1]
    return FieldState(grid, values[:, None], "physical", u0.time + t)


def coth_operator_1d(f: FieldState, h: float) -> FieldState:
    """L_h f, the multiplier i coth(h xi) (zero mode removed)."""
    if f.grid.dims != 1:
        raise ValueError("coth_operator_1d works on line grids")
    xi, _ = f.grid.wavenumbers()
    hat = f.spectral().values * coth_symbol_1d(xi, h)
    out = f.with_values(hat, "spectral")
    return out if f.representation == "spectral" else out.physical()


def assemble_1d(grid: SpectralGrid, h: float | None = None, omega0: float = 1.0, k0: float = 1.0,
                comoving: bool = True, **params) -> ModelSpec:
    """The single-equation 1D Dysthe model; ``h=None`` is infinite depth."""
    return assemble("dysthe_1d", grid, h=h, omega0=omega0, k0=k0, comoving=comoving, **params)


def evolve_1d(u0: FieldState, spec: ModelSpec, T: float, controls: Controls | None = None) -> Trajectory:
    if spec.dims != 1:
        raise ValueError("evolve_1d needs a 1D model")
    return evolve(u0, spec, T, controls)


def to_lab_frame(u: FieldState, omega0: float = 1.0, k0: float = 1.0) -> FieldState:
    """Undo the comoving change of variable X = x - (Omega0 / 2 k0) t at the time of u."""
    speed = omega0 / (2 * k0)
    xi, _ = u.grid.wavenumbers()
    hat = np.exp(-1j * xi * speed * u.time) * u.spectral().values
    out = u.with_values(hat, "spectral")
    return out if u.representation == "spectral" else out.physical()


def kernel_error(u0: FieldState, spec: ModelSpec, t: float, alpha: float, beta: float) -> float:
    """Relative L2 gap between Airy-kernel quadrature and spectral propagation."""
    exact = linear_propagate(u0, spec, t).physical().values
    conv = airy_convolution(u0, t, alpha, beta).values
    return float(np.linalg.norm(conv - exact) / np.linalg.norm(exact))
