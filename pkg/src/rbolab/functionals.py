"""Scalar functionals and norms: action, constraint, energy, mass, ratios.

All integrals are trapezoid sums over the periodic box (spectrally accurate
for periodic data).  Quadratic forms are evaluated in Fourier space through
Parseval, ``sum |u|^2 dx = 2L sum |coeff|^2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveK, ZeroField
from .spectral import (
    Grid,
    RealField,
    dealias,
    project_zero_mean,
    require_zero_mean,
    to_spectrum,
)

__all__ = [
    "WaveParams",
    "FunctionalRecord",
    "action_I",
    "constraint_K",
    "energy_E",
    "mass_V",
    "m_ratio",
    "sobolev_norm",
    "h_half_norm",
    "inv_deriv_norm",
    "x_norm",
    "gn_diagnostic",
    "k_over_i_ratio",
    "random_zero_mean_field",
    "diagnostic_corpus",
    "functional_record",
]


@dataclass(frozen=True)
class WaveParams:
    """Wave speed ``c > 0`` and rotation parameter ``gamma >= 0``."""

    c: float
    gamma: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.c) and self.c > 0):
            raise ValueError(f"c must be positive, got {self.c!r}")
        if not (np.isfinite(self.gamma) and self.gamma >= 0):
            raise ValueError(f"gamma must be non-negative, got {self.gamma!r}")
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "gamma", float(self.gamma))


@dataclass(frozen=True)
class FunctionalRecord:
    I_value: float
    K_value: float
    E_value: float
    V_value: float
    m_value: float
    h_half_norm: float
    x_norm: float
    inv_deriv_norm: float


def _weighted_sq(u: RealField, weight: np.ndarray) -> float:
    c = to_spectrum(u).coeffs
    return float(np.sum(weight * np.abs(c) ** 2) * u.grid.length)


def _half_deriv_sq(u: RealField) -> float:
    return _weighted_sq(u, np.abs(u.grid.xi))


def _inv_deriv_sq(u: RealField) -> float:
    xi = u.grid.xi
    w = np.zeros_like(xi)
    nz = xi != 0
    w[nz] = 1.0 / xi[nz] ** 2
    return _weighted_sq(u, w)


def mass_V(u: RealField) -> float:
    return float(np.dot(u.values, u.values) * u.grid.dx)


def _cubic(u: RealField) -> float:
    v = dealias(u).values
    return float(np.sum(v ** 3) * u.grid.dx)


def action_I(u: RealField, p: WaveParams) -> float:
    """``int 1/2 (|D|^{1/2}u)^2 + c/2 u^2 + gamma/2 (d_x^{-1}u)^2``."""
    val = 0.5 * _half_deriv_sq(u) + 0.5 * p.c * mass_V(u)
    if p.gamma > 0:
        require_zero_mean(u)
        val += 0.5 * p.gamma * _inv_deriv_sq(u)
    return val


def constraint_K(u: RealField) -> float:
    """``(1/3) int u^3`` with the cube taken of the dealiased field."""
    return _cubic(u) / 3.0


def energy_E(u: RealField, gamma: float) -> float:
    val = 0.5 * _half_deriv_sq(u) - _cubic(u) / 3.0
    if gamma > 0:
        require_zero_mean(u)
        val += 0.5 * gamma * _inv_deriv_sq(u)
    return val


def m_ratio(u: RealField, p: WaveParams) -> float:
    """Scale-invariant ratio ``I(u) / K(u)^{2/3}``."""
    k = constraint_K(u)
    if not k > 0:
        raise NonPositiveK(f"K(u) = {k:.6e} must be positive")
    return action_I(u, p) / k ** (2.0 / 3.0)


def sobolev_norm(u: RealField, s: float) -> float:
    """Inhomogeneous norm with weight ``(1 + xi^2)^{s/2}``."""
    if not -1.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [-1, 1], got {s!r}")
    return float(np.sqrt(_weighted_sq(u, (1.0 + u.grid.xi ** 2) ** s)))


def h_half_norm(u: RealField) -> float:
    return sobolev_norm(u, 0.5)


def inv_deriv_norm(u: RealField) -> float:
    require_zero_mean(u)
    return float(np.sqrt(_inv_deriv_sq(u)))


def x_norm(u: RealField) -> float:
    """``||u||_{H^{1/2}} + ||d_x^{-1} u||_{L^2}`` (zero-mean fields)."""
    return h_half_norm(u) + inv_deriv_norm(u)


def gn_diagnostic(u: RealField) -> float:
    """Ratio ``||u||_3^3 / (||u||_{H^{1/2}}^{7/3} ||d_x^{-1}u||^{2/3})``.

    Bounded over any corpus by the interpolation inequality that makes the
    constrained infimum positive; its size is a diagnostic only.
    """
    require_zero_mean(u)
    if not np.any(u.values):
        raise ZeroField("diagnostic undefined for the zero field")
    l3 = float(np.sum(np.abs(u.values) ** 3) * u.grid.dx)
    return l3 / (h_half_norm(u) ** (7.0 / 3.0) * inv_deriv_norm(u) ** (2.0 / 3.0))


def k_over_i_ratio(u: RealField, p: WaveParams) -> float:
    """``K(u) / I(u)^{3/2}``; bounded above whenever ``gamma > 0``."""
    i = action_I(u, p)
    if i <= 0:
        raise ZeroField("action vanishes")
    return constraint_K(u) / i ** 1.5


def random_zero_mean_field(grid: Grid, rng: np.random.Generator, *,
                           kmax: int | None = None, decay: float = 1.0,
                           even: bool = False) -> RealField:
    """Smooth random zero-mean field with spectrum ``~ (1 + xi^2)^{-decay}``.

    Modes with ``|k| > kmax`` (default ``n // 3``) are zero, so the field is
    band-limited and alias-free under squaring.
    """
    if kmax is None:
        kmax = grid.n // 3
    k = grid.k
    amp = (1.0 + grid.xi ** 2) ** (-decay / 2)
    amp[(np.abs(k) > kmax) | (k == 0)] = 0.0
    z = rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n)
    if even:
        z = z.real.astype(complex)
    c = amp * z
    # impose Hermitian symmetry; Nyquist is excluded by kmax < n/2
    c = 0.5 * (c + np.conj(c[grid.reflect_index]))
    values = np.fft.ifft(c * grid._phase).real * grid.n
    return project_zero_mean(RealField(grid, values))


def diagnostic_corpus(grid: Grid, size: int = 100, seed: int = 0):
    """Deterministic corpus of random smooth zero-mean fields.

    Spectral decay exponents and band limits vary across the corpus so that
    both smooth and rough members appear.
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(size):
        decay = rng.uniform(0.75, 2.0)
        kmax = int(rng.integers(4, grid.n // 3))
        out.append(random_zero_mean_field(grid, rng, kmax=kmax, decay=decay))
    return out


def functional_record(u: RealField, p: WaveParams) -> FunctionalRecord:
    """All scalar diagnostics of ``u``.

    The antiderivative norm is taken of the zero-mean projection, so the
    record is also defined for ``gamma = 0`` profiles that carry a mean.
    """
    k = constraint_K(u)
    u0 = project_zero_mean(u)
    h = h_half_norm(u)
    idn = inv_deriv_norm(u0)
    return FunctionalRecord(
        I_value=action_I(u, p),
        K_value=k,
        E_value=energy_E(u, p.gamma),
        V_value=mass_V(u),
        m_value=m_ratio(u, p) if k > 0 else float("nan"),
        h_half_norm=h,
        x_norm=h + idn,
        inv_deriv_norm=idn,
    )
