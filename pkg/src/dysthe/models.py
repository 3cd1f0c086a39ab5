"""Equations of the Dysthe family reduced to ``u_t = i Omega(D) u + sum_j c_j N_j(u)``.

Every model is divided through so that the time derivative has unit
coefficient.  The linear part is the real dispersion table ``omega`` (the
evolution symbol is ``1j * omega``); the nonlinear part is the fixed set

    N1 = |u|^2 u,   N2 = |u|^2 u_x,   N3 = u^2 conj(u)_x,   N4 = u d_x M(|u|^2),

with ``M`` the Riesz transform R_x (infinite depth) or ``-L_h`` (finite depth,
which tends to R_x as h grows).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import symbols
from .spectral import FieldState, SpectralGrid, dealias_mask, fft2, ifft2

KINDS = (
    "normalized",
    "general",
    "full",
    "finite_depth",
    "gravity_capillary",
    "kappa_infinity",
    "dysthe_1d",
    "trulsen_dysthe",
)

# physical coefficients of the Dysthe equation once divided by 2i
DYSTHE_C = (-2j, -6.0, 1.0, 2j)


class ModelError(ValueError):
    """Invalid model parameters."""


@dataclass(frozen=True, eq=False)
class ModelSpec:
    kind: str
    grid: SpectralGrid
    omega: np.ndarray = field(repr=False)
    c: np.ndarray
    nonlocal_op: str = "riesz_x"
    depth: float | None = None
    params: Mapping = field(default_factory=dict)
    dealiasing: str = "truncate"

    def __post_init__(self):
        c = np.asarray(self.c, dtype=complex).reshape(4)
        if not np.all(np.isfinite(c)):
            raise ModelError("nonlinear coefficients must be finite")
        object.__setattr__(self, "c", c)
        omega = np.asarray(self.omega, dtype=float)
        if omega.shape != self.grid.shape:
            raise ModelError("dispersion table does not match the grid")
        object.__setattr__(self, "omega", omega)
        if self.dealiasing not in ("truncate", "pad"):
            raise ModelError(f"unknown dealiasing mode {self.dealiasing!r}")
        xi, mu = self.grid.wavenumbers()
        object.__setattr__(self, "_dx", 1j * xi)
        object.__setattr__(self, "_mask", dealias_mask(self.grid))
        object.__setattr__(self, "_n4", _n4_symbol(self.grid, self.nonlocal_op, self.depth))
        if self.dealiasing == "pad":
            big = _padded_grid(self.grid)
            index, scale = _embedding(self.grid, big)
            object.__setattr__(self, "_padding", (big, index, scale))
            object.__setattr__(self, "_n4_big", _n4_symbol(big, self.nonlocal_op, self.depth))

    @property
    def dims(self) -> int:
        return self.grid.dims

    @property
    def linear_symbol(self) -> np.ndarray:
        return 1j * self.omega

    def with_coefficients(self, c) -> "ModelSpec":
        return ModelSpec(self.kind, self.grid, self.omega, c, self.nonlocal_op,
                         self.depth, dict(self.params), self.dealiasing)


def _n4_symbol(grid: SpectralGrid, nonlocal_op: str, depth) -> np.ndarray:
    """Symbol of d_x M for the mean-flow operator M."""
    xi, mu = grid.wavenumbers()
    if nonlocal_op == "riesz_x":
        if grid.dims == 1:
            # -i sign(xi): the line version of R_x is the Hilbert-type multiplier
            return np.real(1j * xi * (-1j * np.sign(xi)))
        return np.real(1j * xi * symbols.riesz_x_symbol(xi, mu))
    if nonlocal_op == "coth_depth":
        if grid.dims == 1:
            return -symbols.dx_coth_symbol_1d(xi, depth)
        return np.real(-(1j * xi) * symbols.finite_depth_symbol(xi, mu, depth))
    raise ModelError(f"unknown nonlocal operator {nonlocal_op!r}")


def _polynomial(grid: SpectralGrid, terms: Mapping[tuple[int, int], float]) -> np.ndarray:
    xi, mu = grid.wavenumbers()
    out = np.zeros(grid.shape)
    for (a, b), coef in terms.items():
        out = out + coef * xi**a * mu**b
    return out


def _check_depth(h) -> float | None:
    if h is None or (isinstance(h, float) and math.isinf(h)):
        return None
    if not h > 0:
        raise ModelError(f"depth h must be positive, got {h}")
    return float(h)


def assemble(kind: str, grid: SpectralGrid, **params) -> ModelSpec:
    """Build the ModelSpec of one equation of the family.

    Common keyword parameters: ``c`` (overrides the nonlinear coefficients),
    ``omega0``/``k0`` (carrier frequency and wavenumber, default 1), ``h``
    (depth, ``None`` for infinite depth), ``alpha`` (triple for ``general``),
    ``kappa`` (for ``gravity_capillary``), ``n4_coeff`` (printed coefficient
    of the mean-flow term in the gravity-capillary equations, default 1),
    ``comoving`` (drop the transport term of the 1D model, default True),
    ``dealiasing`` ("truncate" or "pad").
    """
    if kind not in KINDS:
        raise ModelError(f"unknown model kind {kind!r}; expected one of {KINDS}")
    if (kind == "dysthe_1d") != (grid.dims == 1):
        raise ModelError(f"model {kind!r} does not live on a {grid.dims}D grid")
    dealiasing = params.pop("dealiasing", "truncate")
    c_override = params.pop("c", None)
    om = float(params.get("omega0", 1.0))
    k0 = float(params.get("k0", 1.0))
    nonlocal_op, depth = "riesz_x", None

    if kind == "normalized":
        omega = symbols.w_symbol(*grid.wavenumbers())
        c = DYSTHE_C
    elif kind == "general":
        alpha = params.get("alpha", (1.0, 0.0, 0.0))
        try:
            d = symbols.DispersionParams(*alpha)
        except ValueError as exc:
            raise ModelError(str(exc)) from None
        omega = symbols.omega_symbol(*grid.wavenumbers(), d)
        c = DYSTHE_C
    elif kind == "full":
        # 2i(v_t + v_x/2) + (-v_xx/4 + v_yy/2) - (i/8)(v_xxx - 6 v_xyy) = RHS, divided by 2i
        omega = _polynomial(grid, {(1, 0): -0.5, (2, 0): 1 / 8, (0, 2): -1 / 4,
                                   (3, 0): -1 / 16, (1, 2): 6 / 16})
        c = DYSTHE_C
        # after y -> sqrt(2) y the symbol is the alpha-family member below; the
        # rescaling also distorts R_x, so the run itself keeps the unscaled form
        params["alpha_after_y_rescale"] = (-1 / 16, 1 / 8, 1 / 2)
    elif kind in ("finite_depth", "trulsen_dysthe", "dysthe_1d"):
        depth = _check_depth(params.get("h"))
        if kind == "finite_depth" and depth is None:
            raise ModelError("finite_depth needs a finite depth h")
        nonlocal_op = "riesz_x" if depth is None else "coth_depth"
        c = (-0.5j * om * k0**2, -1.5 * om * k0, 0.25 * om * k0, 0.5j * om * k0)
        if kind == "finite_depth":
            omega = _polynomial(grid, {
                (1, 0): -om / (2 * k0),
                (2, 0): om / (8 * k0**2),
                (0, 2): -om / (4 * k0**2),
                (3, 0): -om / (16 * k0**3),
                (1, 2): 6 * om / (16 * k0**3),
            })
        elif kind == "dysthe_1d":
            terms = {(2, 0): om / (8 * k0**2), (3, 0): -om / (16 * k0**3)}
            if not params.get("comoving", True):
                terms[(1, 0)] = -om / (2 * k0)
            omega = _polynomial(grid, terms)
        else:
            # the Trulsen-Dysthe operator is printed with omega0 = k0 = 1
            c = (-0.5j, -1.5, 0.25, 0.5j)
            omega = -_polynomial(grid, {
                (1, 0): 1 / 2, (2, 0): -1 / 8, (0, 2): 1 / 4,
                (3, 0): 1 / 16, (1, 2): -3 / 8,
                (4, 0): -5 / 128, (2, 2): 15 / 32, (0, 4): -3 / 32,
                (5, 0): 7 / 256, (3, 2): -35 / 64, (1, 4): 21 / 64,
            })
    elif kind == "gravity_capillary":
        try:
            kc = symbols.kappa_coefficients(params.get("kappa", 0.0))
        except ValueError as exc:
            raise ModelError(str(exc)) from None
        cg = om / (2 * k0) * float(kc.c_g_factor)
        p, q, r, s = (float(x) for x in (kc.p, kc.q, kc.r, kc.s))
        omega = _polynomial(grid, {(1, 0): -cg, (2, 0): -p / 2, (0, 2): -q / 2,
                                   (1, 2): s / 2, (3, 0): r / 2})
        n4 = complex(params.get("n4_coeff", 1.0))
        c = (-0.5j * float(kc.gamma), float(kc.v) / 2, -float(kc.u) / 2, -0.5j * n4)
    elif kind == "kappa_infinity":
        omega = _polynomial(grid, {(1, 0): -3 / 2, (2, 0): -3 / 8, (0, 2): -3 / 4,
                                   (1, 2): 3 / 8, (3, 0): 1 / 16})
        n4 = complex(params.get("n4_coeff", 1.0))
        c = (1j / 16, 3 / 16, 1j / 32, -0.5j * n4)

    if c_override is not None:
        c = c_override
    return ModelSpec(kind, grid, omega, c, nonlocal_op, depth, dict(params), dealiasing)


# ---------------------------------------------------------------------------
# nonlinear terms


def _padded_grid(grid: SpectralGrid) -> SpectralGrid:
    if grid.dims == 1:
        return SpectralGrid(2 * grid.nx, 1, grid.Lx, grid.Ly,
                            2 * np.pi * np.fft.fftfreq(2 * grid.nx, grid.Lx / (2 * grid.nx)), grid.mu)
    nx, ny = 2 * grid.nx, 2 * grid.ny
    return SpectralGrid(nx, ny, grid.Lx, grid.Ly,
                        2 * np.pi * np.fft.fftfreq(nx, grid.Lx / nx),
                        2 * np.pi * np.fft.fftfreq(ny, grid.Ly / ny))


def _embedding(grid: SpectralGrid, big: SpectralGrid):
    ix = np.r_[0:grid.nx // 2, big.nx - grid.nx // 2:big.nx]
    iy = np.r_[0:grid.ny // 2, big.ny - grid.ny // 2:big.ny] if grid.ny > 1 else np.r_[0:1]
    # ortho FFTs: equal physical values need this amplitude factor
    scale = math.sqrt(big.nx * big.ny / (grid.nx * grid.ny))
    return np.ix_(ix, iy), scale


def _terms_physical(hat: np.ndarray, spec: ModelSpec):
    """Physical-space u, u_x and d_x M |u|^2 on the working grid."""
    if spec.dealiasing == "pad":
        big, index, scale = spec._padding
        work = np.zeros(big.shape, dtype=complex)
        work[index] = hat * scale
        dx, n4, mask = 1j * big.wavenumbers()[0], spec._n4_big, None
    else:
        work, dx, n4, mask = hat, spec._dx, spec._n4, spec._mask
    u = ifft2(work)
    ux = ifft2(dx * work)
    dens_hat = fft2(np.abs(u) ** 2)
    if mask is not None:
        dens_hat = np.where(mask, dens_hat, 0.0)
    mflow = ifft2(n4 * dens_hat)
    return u, ux, mflow


def _to_working(u: FieldState) -> np.ndarray:
    return u.spectral().values


def evaluate_nonlinearity(j: int, u: FieldState, spec: ModelSpec) -> FieldState:
    """N_j(u, u, u) as a physical field on the model grid (dealiased)."""
    if j not in (1, 2, 3, 4):
        raise ValueError("nonlinearity index must be 1..4")
    c = np.zeros(4, dtype=complex)
    c[j - 1] = 1.0
    hat = nonlinear_hat(_to_working(u), spec, c)
    return FieldState(u.grid, ifft2(hat), "physical", u.time)


def nonlinear_hat(hat: np.ndarray, spec: ModelSpec, c: np.ndarray | None = None) -> np.ndarray:
    """Spectrum of sum_j c_j N_j(u) for the spectrum ``hat`` of u (hot path)."""
    c = spec.c if c is None else c
    u, ux, mflow = _terms_physical(hat, spec)
    dens = np.abs(u) ** 2
    total = np.zeros_like(u)
    if c[0]:
        total += c[0] * dens * u
    if c[1]:
        total += c[1] * dens * ux
    if c[2]:
        total += c[2] * u * u * np.conj(ux)
    if c[3]:
        total += c[3] * u * mflow
    out = fft2(total)
    if spec.dealiasing == "pad":
        _, index, scale = spec._padding
        out = out[index] / scale
    return np.where(spec._mask, out, 0.0)


def nonlinear_rhs(u: FieldState, spec: ModelSpec) -> FieldState:
    hat = nonlinear_hat(_to_working(u), spec)
    return FieldState(u.grid, ifft2(hat), "physical", u.time)
