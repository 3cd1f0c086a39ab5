"""Fourier symbols of the Dysthe family.

Everything here is a pure function of frequency variables and broadcasts
over numpy arrays.  ``kappa_coefficients`` also accepts ``fractions.Fraction``
so the gravity-capillary table can be checked in exact arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


@dataclass(frozen=True)
class DispersionParams:
    """omega = a1 (xi^3 - 3 xi mu^2) + a2 (xi^2 - mu^2) - a3 xi."""

    alpha1: float
    alpha2: float = 0.0
    alpha3: float = 0.0

    def __post_init__(self):
        if self.alpha1 == 0:
            raise ValueError("alpha1 must be nonzero")


@dataclass(frozen=True)
class KappaCoefficients:
    kappa: float
    p: float
    q: float
    r: float
    s: float
    gamma: float
    u: float
    v: float
    c_g_factor: float

    def as_row(self) -> dict:
        return {name: getattr(self, name) for name in
                ("kappa", "p", "q", "r", "s", "gamma", "u", "v", "c_g_factor")}


def w_symbol(xi, mu):
    """Dispersion relation of the normalized equation, xi^3 - 3 xi mu^2."""
    return xi**3 - 3.0 * xi * mu**2


def omega_symbol(xi, mu, d: DispersionParams):
    return (d.alpha1 * (xi**3 - 3.0 * xi * mu**2)
            + d.alpha2 * (xi**2 - mu**2)
            - d.alpha3 * xi)


def resonance(xi1, mu1, xi2, mu2):
    """Closed form of w(k1 + k2) - w(k1) - w(k2)."""
    return (3.0 * xi1 * xi2 * (xi1 + xi2)
            - 3.0 * xi2 * mu1**2
            - 3.0 * xi1 * mu2**2
            - 6.0 * (xi1 + xi2) * mu1 * mu2)


def resonance_gradient(xi1, mu1, xi, mu):
    """(dR/dxi1, dR/dmu1) of R(xi1, mu1, xi - xi1, mu - mu1) at fixed output (xi, mu)."""
    xi2 = xi - xi1
    mu2 = mu - mu1
    d_xi = 3.0 * (xi2**2 - mu2**2) - 3.0 * (xi1**2 - mu1**2)
    d_mu = 6.0 * xi1 * mu1 - 6.0 * xi2 * mu2
    return d_xi, d_mu


def hessian_det_w(xi, mu):
    return -36.0 * (xi**2 + mu**2)


def riesz_x_symbol(xi, mu):
    """-i xi/|k|, set to 0 at the origin."""
    xi = np.asarray(xi, dtype=float)
    r = np.hypot(xi, mu)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(r > 0, -1j * xi / np.where(r > 0, r, 1.0), 0.0)
    return out[()] if out.ndim == 0 else out


def coth(x):
    """coth for x > 0 without cancellation near 0 or overflow for large x."""
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        small = 1.0 + 2.0 / np.expm1(2.0 * np.minimum(x, 20.0))
        large = 1.0 + 2.0 * np.exp(-2.0 * x)
    out = np.where(x > 20.0, large, small)
    return out[()] if out.ndim == 0 else out


def finite_depth_symbol(xi, mu, h: float):
    """Symbol i (xi/|k|) coth(h|k|) of L_h; 0 wherever xi == 0."""
    if not h > 0:
        raise ValueError(f"depth h must be positive, got {h}")
    xi = np.asarray(xi, dtype=float)
    r = np.hypot(xi, mu)
    nz = xi != 0
    safe_r = np.where(nz, r, 1.0)
    out = np.where(nz, 1j * (xi / safe_r) * coth(h * safe_r), 0.0)
    return out[()] if out.ndim == 0 else out


def coth_symbol_1d(xi, h: float):
    """i coth(h xi); the zero mode is set to 0."""
    if not h > 0:
        raise ValueError(f"depth h must be positive, got {h}")
    xi = np.asarray(xi, dtype=float)
    nz = xi != 0
    safe = np.where(nz, xi, 1.0)
    out = np.where(nz, 1j * np.sign(safe) * coth(h * np.abs(safe)), 0.0)
    return out[()] if out.ndim == 0 else out


def dx_coth_symbol_1d(xi, h: float):
    """Symbol of d/dx composed with L_h in 1D: -xi coth(h xi), equal to -1/h at xi = 0."""
    if not h > 0:
        raise ValueError(f"depth h must be positive, got {h}")
    xi = np.asarray(xi, dtype=float)
    a = np.abs(xi) * h
    nz = a > 0
    safe = np.where(nz, a, 1.0)
    out = np.where(nz, -(np.abs(xi)) * coth(safe), -1.0 / h)
    return out[()] if out.ndim == 0 else out


def kappa_coefficients(kappa) -> KappaCoefficients:
    """Gravity-capillary coefficient table for surface tension parameter kappa."""
    if kappa < 0:
        raise ValueError(f"kappa must be >= 0, got {kappa}")
    if kappa * 2 == 1:
        raise ValueError("kappa = 1/2 is singular (factor 1 - 2 kappa)")
    k = kappa
    one = Fraction(1) if isinstance(k, Fraction) else 1.0
    p = (3 * k**2 + 6 * k - 1) / (4 * (1 + k) ** 2) * one
    q = (1 + 3 * k) / (2 * (1 + k)) * one
    r = -(1 - k) * (1 + 6 * k + k**2) / (8 * (1 + k) ** 3) * one
    s = (3 + 2 * k + 3 * k**2) / (4 * (1 + k) ** 2) * one
    gamma = (8 + k + 2 * k**2) / (8 * (1 - 2 * k) * (1 + k)) * one
    u = (1 - k) * (8 + k + 2 * k**2) / (16 * (1 - 2 * k) * (1 + k) ** 2) * one
    v = 3 * (4 * k**4 + 4 * k**3 - 9 * k**2 + k - 8) / (8 * (1 + k) ** 2 * (1 - 2 * k) ** 2) * one
    c_g_factor = (1 + 3 * k) / (1 + k) * one
    return KappaCoefficients(k, p, q, r, s, gamma, u, v, c_g_factor)
