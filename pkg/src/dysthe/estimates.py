"""Measured constants of the linear and bilinear estimates, and scattering diagnostics.

All free evolutions are sampled on ``nt`` equally spaced times covering the
symmetric window [-T, T] and integrated in time with the trapezoid rule.
Nothing here asserts a value: the functions return the implied constant of
an inequality so that callers can check it stays bounded.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

import scipy.fft as sfft

from .evolve import Trajectory, linear_propagate
from .models import ModelSpec
from .spectral import (
    FieldState,
    SpectralGrid,
    check_dyadic,
    dyadic_weight,
    ifft2,
    l2_norm,
    make_grid,
    streamed_mixed_norm,
)
from .symbols import w_symbol

DEFAULT_NT = 65


class EstimateError(ValueError):
    """Input data cannot produce a meaningful ratio."""


def window_times(T_window: float, nt: int = DEFAULT_NT) -> np.ndarray:
    if not T_window > 0:
        raise ValueError(f"T_window must be positive, got {T_window}")
    if nt < 3:
        raise ValueError("need at least 3 time samples")
    return np.linspace(-T_window, T_window, nt)


def _free_slices(hat: np.ndarray, omega: np.ndarray, times: np.ndarray,
                 multiplier: np.ndarray | None = None):
    """Yield S(t) applied to ``hat`` at each time, touching only the support."""
    support = np.nonzero(hat)
    coeffs = hat[support] if multiplier is None else (multiplier * hat)[support]
    w = omega[support]
    buf = np.zeros(hat.shape, dtype=complex)
    for t in times:
        buf[support] = np.exp(1j * t * w) * coeffs
        yield ifft2(buf)


def _require_mass(f: FieldState, what: str) -> float:
    m = l2_norm(f)
    if not m > 0:
        raise EstimateError(f"{what} has zero L2 norm")
    return m


def strichartz_ratio(phi0: FieldState, T_window: float, nt: int = DEFAULT_NT) -> float:
    """||D^{1/4} S(t) phi0||_{L^4_{t,x,y}} / ||phi0||_{L^2} over |t| <= T_window."""
    norm = _require_mass(phi0, "initial datum")
    grid = phi0.grid
    times = window_times(T_window, nt)
    hat = phi0.spectral().values
    omega = w_symbol(*grid.wavenumbers())
    slices = _free_slices(hat, omega, times, grid.kmod() ** 0.25)
    return streamed_mixed_norm(slices, 4, 4, grid.cell, times[1] - times[0]) / norm


def l4_band_ratio(phi0: FieldState, N, T_window: float, nt: int = DEFAULT_NT) -> float:
    """||P_N S(t) phi0||_{L^4} N^{1/4} / ||P_N phi0||_{L^2}."""
    check_dyadic(N)
    if N < 2:
        raise EstimateError("band estimate needs N >= 2")
    grid = phi0.grid
    hat = phi0.spectral().values * dyadic_weight(grid.kmod(), N)
    norm = np.sqrt(grid.cell * np.sum(np.abs(hat) ** 2))
    if not norm > 0:
        raise EstimateError(f"datum has no mass in the shell N = {N}")
    times = window_times(T_window, nt)
    omega = w_symbol(*grid.wavenumbers())
    value = streamed_mixed_norm(_free_slices(hat, omega, times), 4, 4, grid.cell, times[1] - times[0])
    return value * float(N) ** 0.25 / norm


@dataclass(frozen=True)
class BilinearSample:
    N1: int
    N2: int
    product_norm: float
    norm1: float
    norm2: float

    @property
    def constant(self) -> float:
        """Implied constant of ||u1 u2|| <= C N2^{1/2} / N1 ||phi1|| ||phi2||."""
        return self.product_norm * self.N1 / np.sqrt(self.N2) / (self.norm1 * self.norm2)


def bilinear_sample(phi1: FieldState, N1, phi2: FieldState, N2, T_window: float,
                    nt: int = DEFAULT_NT) -> BilinearSample:
    """Space-time L2 norm of (P_N1 S phi1)(P_N2 S phi2) with both shell norms."""
    check_dyadic(N1)
    check_dyadic(N2)
    if N1 < 4 * N2:
        raise EstimateError(f"needs N1 >= 4 N2, got N1 = {N1}, N2 = {N2}")
    if phi1.grid is not phi2.grid:
        raise EstimateError("both data must live on the same grid")
    grid = phi1.grid
    kmod = grid.kmod()
    hats, norms = [], []
    for f, N in ((phi1, N1), (phi2, N2)):
        hat = f.spectral().values * dyadic_weight(kmod, N)
        norm = np.sqrt(grid.cell * np.sum(np.abs(hat) ** 2))
        if not norm > 0:
            raise EstimateError(f"datum has no mass in the shell N = {N}")
        hats.append(hat)
        norms.append(norm)
    times = window_times(T_window, nt)
    omega = w_symbol(*grid.wavenumbers())
    products = (a * b for a, b in zip(_free_slices(hats[0], omega, times),
                                      _free_slices(hats[1], omega, times)))
    value = streamed_mixed_norm(products, 2, 2, grid.cell, times[1] - times[0])
    return BilinearSample(int(N1), int(N2), value, norms[0], norms[1])


def bilinear_ratio(phi1: FieldState, N1, phi2: FieldState, N2, T_window: float,
                   nt: int = DEFAULT_NT) -> float:
    return bilinear_sample(phi1, N1, phi2, N2, T_window, nt).constant


# ---------------------------------------------------------------------------
# random shell data


def draw_generator(seed: int, draw: int) -> np.random.Generator:
    """Counter-based stream keyed by (seed, draw), independent of call order."""
    key = np.array([seed, draw], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def random_shell_datum(grid: SpectralGrid, N, rng: np.random.Generator, width: float = 1.0) -> FieldState:
    """Complex white noise under a Gaussian window of the given width, projected to the shell N."""
    check_dyadic(N)
    x, y = grid.mesh()
    noise = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    window = np.exp(-(x**2 + y**2) / (2 * width**2))
    f = FieldState(grid, noise * window, "physical")
    hat = f.spectral().values * dyadic_weight(grid.kmod(), N)
    return FieldState(grid, hat, "spectral")


def shell_grid(N1: int, N2: int, L: float) -> SpectralGrid:
    """Smallest FFT-friendly square grid on which the product of the two shells does not alias."""
    # the product spectrum lies in the disc of radius 8/5 (N1 + N2)
    need = int(np.ceil(2 * 1.6 * (N1 + N2) * L / (2 * np.pi))) + 2
    n = sfft.next_fast_len(need)
    n += n % 2
    return make_grid(max(n, 16), max(n, 16), L, L)


@dataclass(frozen=True)
class BilinearStudy:
    N1: np.ndarray
    N2: int
    constants: np.ndarray        # (len(N1), draws)
    product_norms: np.ndarray    # (len(N1), draws), unit-normalized data

    @property
    def mean_constants(self) -> np.ndarray:
        return self.constants.mean(axis=1)

    @property
    def slope(self) -> float:
        """Least-squares slope of log C against log N1."""
        return float(np.polyfit(np.log(self.N1), np.log(self.mean_constants), 1)[0])

    @property
    def raw_slope(self) -> float:
        return float(np.polyfit(np.log(self.N1), np.log(self.product_norms.mean(axis=1)), 1)[0])

    @property
    def spread(self) -> np.ndarray:
        """max/min of the constant over draws, per N1."""
        return self.constants.max(axis=1) / self.constants.min(axis=1)


def bilinear_study(N1_values: Sequence[int], N2: int, draws: int, seed: int = 0,
                   L: float = 4 * np.pi, tau0: float = 1.0, nt: int = 65,
                   width: float = 1.0) -> BilinearStudy:
    """Monte-Carlo constants of the bilinear estimate at fixed N2.

    The window is T = tau0 / N1^2: the high-frequency packet then crosses the
    same distance for every N1, which keeps wrap-around on the torus
    comparable across the sweep.
    """
    check_dyadic(N2)
    consts = np.empty((len(N1_values), draws))
    raw = np.empty_like(consts)
    for i, N1 in enumerate(N1_values):
        grid = shell_grid(N1, N2, L)
        T = tau0 / float(N1) ** 2
        for d in range(draws):
            rng = draw_generator(seed, i * draws + d)
            phi1 = random_shell_datum(grid, N1, rng, width)
            phi2 = random_shell_datum(grid, N2, rng, width)
            s = bilinear_sample(phi1, N1, phi2, N2, T, nt)
            consts[i, d] = s.constant
            raw[i, d] = s.product_norm / (s.norm1 * s.norm2)
    return BilinearStudy(np.asarray(N1_values, dtype=float), int(N2), consts, raw)


# ---------------------------------------------------------------------------
# scattering


@dataclass(frozen=True)
class ScatteringProfile:
    times: np.ndarray
    differences: np.ndarray      # ||S(-t_k) u(t_k) - S(-t_{k-1}) u(t_{k-1})||, k >= 1
    pullback: FieldState         # S(-t_last) u(t_last), the scattering-state candidate

    @property
    def ratios(self) -> np.ndarray:
        return self.differences[1:] / self.differences[:-1]


def scattering_profile(traj: Trajectory, spec: ModelSpec) -> ScatteringProfile:
    """Cauchy differences of the free pullbacks of the trajectory snapshots."""
    snaps = traj.snapshots
    if len(snaps) < 3:
        raise EstimateError("scattering profile needs at least 3 snapshots")
    backs = [linear_propagate(s.spectral(), spec, -s.time) for s in snaps]
    diffs = np.array([
        l2_norm(b.with_values(b.values - a.values)) for a, b in zip(backs[:-1], backs[1:])
    ])
    last = backs[-1].physical()
    return ScatteringProfile(np.array([s.time for s in snaps]), diffs, last)
