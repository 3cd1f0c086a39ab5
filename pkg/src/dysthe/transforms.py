"""Exact symmetries: the Galilean-type change of variables, scaling and time reversal.

Change of variables.  If v solves

    v_t = i omega_alpha(D) v + sum_j c_j N_j(v),
    omega_alpha = a1 (xi^3 - 3 xi mu^2) + a2 (xi^2 - mu^2) - a3 xi

(alpha1, alpha2, alpha3 written a1..a3 only in this paragraph), then

    u(t, x, y) = exp(i theta t) exp(i a2' x) v(t / alpha1, x + a1' t, y),
    theta = a1' a2' - a3',

solves the normalized equation with the coefficients returned by
``remap_nonlinear_coeffs``.  Primes denote the CovCoefficients.  Time runs
alpha1 times faster on the u side, which is why the nonlinear coefficients
pick up a factor 1/alpha1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import FieldState, SpectralGrid, fft2, ifft2
from .symbols import DispersionParams

LATTICE_TOL = 1e-9


@dataclass(frozen=True)
class CovCoefficients:
    a1: float
    a2: float
    a3: float

    @property
    def theta(self) -> float:
        """Frequency of the global phase factor."""
        return self.a1 * self.a2 - self.a3


def cov_coefficients(d: DispersionParams) -> CovCoefficients:
    a1, a2, a3 = d.alpha1, d.alpha2, d.alpha3
    if a1 == 0:
        raise ValueError("alpha1 must be nonzero")
    return CovCoefficients(
        a2**2 / (3 * a1**2) + a3 / a1,
        a2 / (3 * a1),
        a2 * a3 / (3 * a1**2) + 2.0 / 27.0 * a2**3 / a1**3,
    )


def _lattice_shift(grid: SpectralGrid, a2: float) -> float:
    """a2 snapped onto the x frequency lattice of the grid."""
    dxi = 2 * np.pi / grid.Lx
    m = round(a2 / dxi)
    if abs(a2 / dxi - m) > LATTICE_TOL:
        raise ValueError(
            f"a2 = {a2} is not on the frequency lattice (spacing {dxi:.6g}); "
            "choose Lx so that a2 * Lx / (2 pi) is an integer"
        )
    return m * dxi


def apply_cov(v: FieldState, d: DispersionParams) -> FieldState:
    """Map a solution state of the alpha-model at time s to the normalized state at alpha1 * s."""
    cc = cov_coefficients(d)
    grid = v.grid
    a2 = _lattice_shift(grid, cc.a2)
    t = d.alpha1 * v.time
    xi, _ = grid.wavenumbers()
    shifted = ifft2(np.exp(1j * xi * cc.a1 * t) * fft2(v.physical().values))
    x, _ = grid.mesh()
    u = np.exp(1j * cc.theta * t) * np.exp(1j * a2 * x) * shifted
    return FieldState(grid, u, "physical", t)


def apply_cov_inverse(u: FieldState, d: DispersionParams) -> FieldState:
    cc = cov_coefficients(d)
    grid = u.grid
    a2 = _lattice_shift(grid, cc.a2)
    t = u.time
    x, _ = grid.mesh()
    w = np.exp(-1j * cc.theta * t) * np.exp(-1j * a2 * x) * u.physical().values
    xi, _ = grid.wavenumbers()
    v = ifft2(np.exp(-1j * xi * cc.a1 * t) * fft2(w))
    return FieldState(grid, v, "physical", t / d.alpha1)


def remap_nonlinear_coeffs(c, a2: float, alpha1: float = 1.0) -> np.ndarray:
    """Coefficients of the normalized equation solved by the transformed field."""
    c = np.asarray(c, dtype=complex).reshape(4)
    if alpha1 == 0:
        raise ValueError("alpha1 must be nonzero")
    out = c.copy()
    out[0] = c[0] - 1j * a2 * c[1] + 1j * a2 * c[2]
    return out / alpha1


def scale_field(u: FieldState, lam: float) -> FieldState:
    """u_lambda(t, x, y) = lambda u(lambda^3 t, lambda x, lambda y) on the box shrunk by lambda.

    The sample values are reused, so the map is exact on the grid.
    """
    if not lam > 0:
        raise ValueError(f"scaling factor must be positive, got {lam}")
    grid = u.grid.scaled(lam)
    return FieldState(grid, lam * u.physical().values, "physical", u.time / lam**3)


def _reflect(values: np.ndarray) -> np.ndarray:
    # x_j -> -x_j is the index map j -> (n - j) mod n on the centred grid
    out = np.roll(values[::-1], 1, axis=0)
    if values.shape[1] > 1:
        out = np.roll(out[:, ::-1], 1, axis=1)
    return out


def time_reversal(u: FieldState) -> FieldState:
    """I(u)(t, x, y) = conj u(-t, -x, -y); an involution."""
    return FieldState(u.grid, np.conj(_reflect(u.physical().values)), "physical", -u.time)
