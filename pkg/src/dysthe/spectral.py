"""Periodic grids, unitary FFTs, dyadic projectors and norms.

Physical samples live on a centred box: ``x_j = -Lx/2 + j*Lx/nx``.  Spectral
arrays use numpy's native FFT ordering with ``norm="ortho"``, so the discrete
Parseval identity holds without extra factors and integrals are recovered by
multiplying sums with the cell area ``Lx*Ly/(nx*ny)``.

A one-dimensional problem is a grid with ``ny == 1``; every routine here
works on arrays of shape ``(nx, ny)`` (or ``(nt, nx, ny)`` for space-time
fields) regardless.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Iterable, Literal

import numpy as np
import scipy.fft as sfft

Representation = Literal["physical", "spectral"]

# plateau and support edges of the cutoff eta
ETA_INNER = 5.0 / 4.0
ETA_OUTER = 8.0 / 5.0


class GridError(ValueError):
    """Invalid grid parameters."""


class RepresentationError(ValueError):
    """A field was handed over in the wrong representation."""


@dataclass(frozen=True, eq=False)
class SpectralGrid:
    """Periodic box and its dual frequency lattice."""

    nx: int
    ny: int
    Lx: float
    Ly: float
    xi: np.ndarray = field(repr=False)
    mu: np.ndarray = field(repr=False)

    @property
    def dims(self) -> int:
        return 1 if self.ny == 1 else 2

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def dx(self) -> float:
        return self.Lx / self.nx

    @property
    def dy(self) -> float:
        return self.Ly / self.ny

    @property
    def cell(self) -> float:
        """Quadrature weight of one sample (a length in 1D)."""
        return self.dx if self.dims == 1 else self.dx * self.dy

    @property
    def x(self) -> np.ndarray:
        return -0.5 * self.Lx + self.dx * np.arange(self.nx)

    @property
    def y(self) -> np.ndarray:
        if self.dims == 1:
            return np.zeros(1)
        return -0.5 * self.Ly + self.dy * np.arange(self.ny)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Physical coordinates broadcast to ``shape``."""
        return np.meshgrid(self.x, self.y, indexing="ij")

    def wavenumbers(self) -> tuple[np.ndarray, np.ndarray]:
        """Frequency coordinates ``(xi, mu)`` broadcast to ``shape``."""
        return np.meshgrid(self.xi, self.mu, indexing="ij")

    def kmod(self) -> np.ndarray:
        xi, mu = self.wavenumbers()
        return np.hypot(xi, mu)

    def mode_index(self) -> tuple[np.ndarray, np.ndarray]:
        """Signed integer mode numbers broadcast to ``shape``."""
        j = np.rint(sfft.fftfreq(self.nx, 1.0 / self.nx)).astype(int)
        k = np.rint(sfft.fftfreq(self.ny, 1.0 / self.ny)).astype(int)
        return np.meshgrid(j, k, indexing="ij")

    def nyquist_mask(self) -> np.ndarray:
        """True on the Nyquist row/column (absent along a trivial axis)."""
        j, k = self.mode_index()
        mask = j == -self.nx // 2
        if self.ny > 1:
            mask |= k == -self.ny // 2
        return mask

    def scaled(self, factor: float) -> "SpectralGrid":
        """Same mode counts on a box shrunk by ``factor``."""
        if self.dims == 1:
            return make_grid_1d(self.nx, self.Lx / factor)
        return make_grid(self.nx, self.ny, self.Lx / factor, self.Ly / factor)


def _lattice(n: int, length: float) -> np.ndarray:
    return 2.0 * np.pi * sfft.fftfreq(n, length / n)


def make_grid(nx: int, ny: int, Lx: float, Ly: float) -> SpectralGrid:
    """Build a 2D periodic grid; mode counts must be even and at least 8."""
    for name, n in (("nx", nx), ("ny", ny)):
        if int(n) != n or n < 8 or n % 2:
            raise GridError(f"{name} must be an even integer >= 8, got {n!r}")
    for name, length in (("Lx", Lx), ("Ly", Ly)):
        if not (length > 0 and math.isfinite(length)):
            raise GridError(f"{name} must be positive, got {length!r}")
    nx, ny = int(nx), int(ny)
    return SpectralGrid(nx, ny, float(Lx), float(Ly), _lattice(nx, Lx), _lattice(ny, Ly))


def make_grid_1d(nx: int, Lx: float) -> SpectralGrid:
    """A line grid, stored as ``ny == 1`` with the single frequency ``mu = 0``."""
    if int(nx) != nx or nx < 8 or nx % 2:
        raise GridError(f"nx must be an even integer >= 8, got {nx!r}")
    if not (Lx > 0 and math.isfinite(Lx)):
        raise GridError(f"Lx must be positive, got {Lx!r}")
    return SpectralGrid(int(nx), 1, float(Lx), 1.0, _lattice(int(nx), Lx), np.zeros(1))


@dataclass(frozen=True, eq=False)
class FieldState:
    """Complex envelope on a grid at one instant."""

    grid: SpectralGrid
    values: np.ndarray
    representation: Representation = "physical"
    time: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != self.grid.shape:
            values = values.reshape(self.grid.shape)
        object.__setattr__(self, "values", values)
        if self.representation not in ("physical", "spectral"):
            raise RepresentationError(f"unknown representation {self.representation!r}")

    def physical(self) -> "FieldState":
        if self.representation == "physical":
            return self
        return spectral_transform(self, "to_physical")

    def spectral(self) -> "FieldState":
        if self.representation == "spectral":
            return self
        return spectral_transform(self, "to_spectral")

    def with_values(self, values: np.ndarray, representation: Representation | None = None,
                    time: float | None = None) -> "FieldState":
        return replace(
            self,
            values=values,
            representation=representation or self.representation,
            time=self.time if time is None else time,
        )


def field_from_function(grid: SpectralGrid, func, time: float = 0.0) -> FieldState:
    """Sample ``func(x, y)`` on the grid."""
    x, y = grid.mesh()
    return FieldState(grid, np.asarray(func(x, y), dtype=complex) * np.ones(grid.shape), "physical", time)


def fft2(values: np.ndarray) -> np.ndarray:
    return sfft.fft2(values, axes=(-2, -1), norm="ortho")


def ifft2(values: np.ndarray) -> np.ndarray:
    return sfft.ifft2(values, axes=(-2, -1), norm="ortho")


def spectral_transform(f: FieldState, direction: str) -> FieldState:
    """Unitary DFT between representations; the input must be in the other one."""
    if direction == "to_spectral":
        if f.representation != "physical":
            raise RepresentationError("to_spectral needs a physical field")
        return f.with_values(fft2(f.values), "spectral")
    if direction == "to_physical":
        if f.representation != "spectral":
            raise RepresentationError("to_physical needs a spectral field")
        return f.with_values(ifft2(f.values), "physical")
    raise ValueError(f"unknown direction {direction!r}")


def zero_nyquist(f: FieldState) -> FieldState:
    s = f.spectral()
    values = s.values.copy()
    values[f.grid.nyquist_mask()] = 0.0
    return s.with_values(values)


# ---------------------------------------------------------------------------
# Littlewood-Paley cutoffs


def _smooth_step(s: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for s <= 0, 1 for s >= 1."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
        b = np.where(s < 1, np.exp(-1.0 / np.where(s < 1, 1.0 - s, 1.0)), 0.0)
        out = a / (a + b)
    return np.where(s <= 0, 0.0, np.where(s >= 1, 1.0, out))


def eta(r) -> np.ndarray:
    """Even bump: 1 on [-5/4, 5/4], 0 outside [-8/5, 8/5]."""
    r = np.abs(np.asarray(r, dtype=float))
    return _smooth_step((ETA_OUTER - r) / (ETA_OUTER - ETA_INNER))


def phi(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return eta(r) - eta(2.0 * r)


def check_dyadic(N) -> int:
    """Return k with N == 2**k, or raise."""
    try:
        value = float(N)
    except (TypeError, ValueError):
        raise ValueError(f"dyadic number expected, got {N!r}") from None
    if value < 1 or not math.isfinite(value):
        raise ValueError(f"dyadic number >= 1 expected, got {N!r}")
    k = int(round(math.log2(value)))
    if 2.0**k != value:
        raise ValueError(f"{N!r} is not a power of two")
    return k


def dyadic_weight(r, N) -> np.ndarray:
    """phi_N evaluated at radius/offset ``r`` (eta for N == 1)."""
    check_dyadic(N)
    r = np.abs(np.asarray(r, dtype=float))
    if N == 1:
        return eta(r)
    return phi(r / N)


def dyadic_cover(rmax: float) -> list[int]:
    """Dyadic numbers whose weights sum to one on [0, rmax]."""
    out = [1]
    while ETA_INNER * out[-1] < rmax:
        out.append(2 * out[-1])
    return out


def lp_project(f: FieldState, N) -> FieldState:
    """Littlewood-Paley piece P_N f, returned in the representation of ``f``."""
    check_dyadic(N)
    s = f.spectral()
    out = s.with_values(s.values * dyadic_weight(f.grid.kmod(), N))
    return out if f.representation == "spectral" else out.physical()


# ---------------------------------------------------------------------------
# space-time fields


@dataclass(frozen=True, eq=False)
class SpaceTimeField:
    """Samples ``values[j] = F(t0 + j*dt)`` on a periodic time window.

    ``T_window == nt*dt`` is the period used by the temporal DFT.
    """

    grid: SpectralGrid
    values: np.ndarray
    dt: float
    t0: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 3 or values.shape[1:] != self.grid.shape:
            raise ValueError(f"values must have shape (nt, {self.grid.nx}, {self.grid.ny})")
        if values.shape[0] < 4:
            raise ValueError("a space-time field needs at least 4 time samples")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        object.__setattr__(self, "values", values)

    @property
    def nt(self) -> int:
        return self.values.shape[0]

    @property
    def T_window(self) -> float:
        return self.nt * self.dt

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.nt)

    @property
    def tau(self) -> np.ndarray:
        return 2.0 * np.pi * sfft.fftfreq(self.nt, self.dt)


def free_wave_field(phi0: FieldState, times: np.ndarray, omega: np.ndarray | None = None) -> np.ndarray:
    """Stack ``S(t) phi0`` for each t (physical values, shape (nt, nx, ny))."""
    from .symbols import w_symbol

    grid = phi0.grid
    if omega is None:
        omega = w_symbol(*grid.wavenumbers())
    hat = phi0.spectral().values
    out = np.empty((len(times),) + grid.shape, dtype=complex)
    for j, t in enumerate(times):
        out[j] = ifft2(np.exp(1j * t * omega) * hat)
    return out


def _spacetime_hat(F: SpaceTimeField) -> np.ndarray:
    # ortho in every axis; the e^{+i tau t} component sits at index m of tau
    return sfft.fftn(F.values, axes=(0, 1, 2), norm="ortho")


def _check_window(F: SpaceTimeField) -> None:
    dtau = 2.0 * np.pi / F.T_window
    if dtau > ETA_OUTER - ETA_INNER:
        warnings.warn(
            f"time window {F.T_window:.3g} gives tau spacing {dtau:.3g}; "
            "the L = 1 modulation band is not resolved",
            RuntimeWarning,
            stacklevel=3,
        )
    edge = max(np.abs(F.values[0]).max(), np.abs(F.values[-1]).max())
    peak = np.abs(F.values).max()
    if peak > 0 and edge > 1e-3 * peak:
        warnings.warn(
            "field is not negligible at the window ends; the periodised "
            "time transform mixes both ends",
            RuntimeWarning,
            stacklevel=3,
        )


def modulation_offset(F: SpaceTimeField) -> np.ndarray:
    """``tau - w(xi, mu)`` on the (nt, nx, ny) lattice."""
    from .symbols import w_symbol

    xi, mu = F.grid.wavenumbers()
    return F.tau[:, None, None] - w_symbol(xi, mu)[None]


def modulation_project(F: SpaceTimeField, L, *, check: bool = True) -> SpaceTimeField:
    """Modulation piece Q_L F of a space-time field."""
    check_dyadic(L)
    if check:
        _check_window(F)
    hat = _spacetime_hat(F) * dyadic_weight(modulation_offset(F), L)
    return replace(F, values=sfft.ifftn(hat, axes=(0, 1, 2), norm="ortho"))


# ---------------------------------------------------------------------------
# norms


def _check_exponent(p) -> float:
    p = float(p)
    if not (p >= 1):
        raise ValueError(f"Lebesgue exponent must lie in [1, inf], got {p}")
    return p


def _spatial_norm(values: np.ndarray, q: float, cell: float) -> np.ndarray:
    """L^q norm over the last two axes."""
    a = np.abs(values)
    if math.isinf(q):
        return a.max(axis=(-2, -1))
    return (cell * (a**q).sum(axis=(-2, -1))) ** (1.0 / q)


def trapezoid_weights(nt: int, dt: float, periodic: bool) -> np.ndarray:
    w = np.full(nt, dt)
    if not periodic:
        w[0] = w[-1] = 0.5 * dt
    return w


def time_norm(slice_norms: np.ndarray, p: float, dt: float, periodic: bool) -> float:
    """L^p_t of a sampled time series of spatial norms."""
    slice_norms = np.asarray(slice_norms, dtype=float)
    if math.isinf(p):
        return float(slice_norms.max())
    w = trapezoid_weights(len(slice_norms), dt, periodic)
    return float((w * slice_norms**p).sum() ** (1.0 / p))


def streamed_mixed_norm(slices: Iterable[np.ndarray], p, q, cell: float, dt: float,
                        periodic: bool = False) -> float:
    """Mixed norm of a space-time field produced one time slice at a time."""
    p, q = _check_exponent(p), _check_exponent(q)
    norms = np.array([_spatial_norm(s, q, cell) for s in slices])
    return time_norm(norms, p, dt, periodic)


def mixed_norm(F: SpaceTimeField | FieldState, p=2, q=2) -> float:
    """``L^p_t L^q_xy`` norm, or the spatial ``L^q`` norm of a single state.

    Time uses the trapezoid rule on the periodic window (every sample carries
    weight ``dt``); space uses the cell-area Riemann sum.
    """
    p, q = _check_exponent(p), _check_exponent(q)
    if isinstance(F, FieldState):
        return float(_spatial_norm(F.physical().values, q, F.grid.cell))
    norms = _spatial_norm(F.values, q, F.grid.cell)
    return time_norm(norms, p, F.dt, periodic=True)


def l2_norm(f: FieldState) -> float:
    """Spatial L2 norm, computed in whichever representation f is held."""
    return float(np.sqrt(f.grid.cell * np.sum(np.abs(f.values) ** 2)))


def sobolev_norm(f: FieldState, s: float) -> float:
    """H^s norm with the Bessel weight (1 + |k|^2)^(s/2)."""
    hat = f.spectral().values
    weight = (1.0 + f.grid.kmod() ** 2) ** s
    return float(np.sqrt(f.grid.cell * np.sum(weight * np.abs(hat) ** 2)))


def xsb_norm(F: SpaceTimeField, s: float, b: float) -> float:
    """Fourier restriction norm ``(sum_{N,L} N^2s L^2b ||P_N Q_L F||^2)^(1/2)``."""
    _check_window(F)
    hat = _spacetime_hat(F)
    power = np.abs(hat) ** 2
    kmod = F.grid.kmod()
    offset = np.abs(modulation_offset(F))
    weight_n = np.zeros(F.grid.shape)
    for N in dyadic_cover(kmod.max()):
        weight_n += float(N) ** (2 * s) * dyadic_weight(kmod, N) ** 2
    weight_l = np.zeros(offset.shape)
    for L in dyadic_cover(offset.max()):
        weight_l += float(L) ** (2 * b) * dyadic_weight(offset, L) ** 2
    total = np.sum(weight_l * weight_n[None] * power)
    return float(np.sqrt(F.grid.cell * F.dt * total))


def spacetime_l2(F: SpaceTimeField) -> float:
    return mixed_norm(F, 2, 2)


# ---------------------------------------------------------------------------
# dealiasing


def dealias_mask(grid: SpectralGrid) -> np.ndarray:
    """Modes kept by the 2/3 rule (|j| <= nx/3 and |k| <= ny/3)."""
    j, k = grid.mode_index()
    keep = np.abs(j) <= grid.nx / 3
    if grid.ny > 1:
        keep &= np.abs(k) <= grid.ny / 3
    return keep


def dealias(f: FieldState) -> FieldState:
    if f.representation != "spectral":
        raise RepresentationError("dealias needs a spectral field")
    return f.with_values(np.where(dealias_mask(f.grid), f.values, 0.0))


def edge_mass(f: FieldState, window: float = 0.5) -> float:
    """Mass outside the centred box spanning ``window`` of each side."""
    x, y = f.grid.mesh()
    inside = np.abs(x) <= 0.5 * window * f.grid.Lx
    if f.grid.dims == 2:
        inside &= np.abs(y) <= 0.5 * window * f.grid.Ly
    v = f.physical().values
    return float(f.grid.cell * np.sum(np.abs(v[~inside]) ** 2))
