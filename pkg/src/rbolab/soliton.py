"""Closed-form Benjamin-Ono solitons, the profile residual, and dilations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ScaleOutOfRange
from .functionals import WaveParams
from .spectral import (
    Grid,
    RealField,
    apply_symbol,
    inv_derivative_symbol,
    l2_norm,
    project_zero_mean,
    require_zero_mean,
)

__all__ = [
    "SolitonSpec",
    "bo_soliton",
    "bo_soliton_dc",
    "bo_soliton_dx",
    "profile_operator_symbol",
    "rbo_residual",
    "dilate",
    "gamma_rescale",
    "rescale_factor",
]

# Closed-form integrals of Q_c on the line (A = 2):
#   int Q = 2 pi,  ||Q||^2 = 2 pi c,  ||D^{1/2} Q||^2 = pi c^2,
#   int Q^3 = 3 pi c^2.
SOLITON_AMPLITUDE = 2.0


@dataclass(frozen=True)
class SolitonSpec:
    c: float
    center: float = 0.0

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c!r}")


def _check_center(spec: SolitonSpec, g: Grid) -> None:
    if abs(spec.center) >= g.half_length:
        raise ValueError(f"center {spec.center} outside the box of half-length {g.half_length}")


def bo_soliton(spec: SolitonSpec, g: Grid) -> RealField:
    """Samples of ``Q_c(x) = A c / (1 + c^2 (x - x0)^2)`` with ``A = SOLITON_AMPLITUDE``.

    With the nonlinearity ``psi^2`` of the profile equation the decaying
    solution has ``A = 2``; the often-quoted ``4c / (1 + c^2 x^2)`` solves the
    variant with ``psi^2 / 2`` and is ``2 Q_c`` here.
    """
    _check_center(spec, g)
    c = spec.c
    s = g.x - spec.center
    return RealField(g, SOLITON_AMPLITUDE * c / (1.0 + (c * s) ** 2))


def bo_soliton_dx(spec: SolitonSpec, g: Grid) -> RealField:
    _check_center(spec, g)
    c = spec.c
    s = g.x - spec.center
    return RealField(g, -2.0 * SOLITON_AMPLITUDE * c ** 3 * s / (1.0 + (c * s) ** 2) ** 2)


def bo_soliton_dc(c: float, g: Grid) -> RealField:
    """Samples of ``dQ_c/dc = A (1 - c^2 x^2) / (1 + c^2 x^2)^2``."""
    if not c > 0:
        raise ValueError(f"c must be positive, got {c!r}")
    cx2 = (c * g.x) ** 2
    return RealField(g, SOLITON_AMPLITUDE * (1.0 - cx2) / (1.0 + cx2) ** 2)


def profile_operator_symbol(xi: np.ndarray, p: WaveParams) -> np.ndarray:
    """Symbol of ``H d_x + c - gamma d_x^{-2}``, i.e. ``|xi| + c + gamma/xi^2``.

    At ``xi = 0`` the rotation part is dropped; callers restrict to zero-mean
    fields whenever ``gamma > 0``.
    """
    s = np.abs(xi) + p.c + 0j
    if p.gamma > 0:
        s = s - p.gamma * inv_derivative_symbol(xi, 2)
    return s


def rbo_residual(psi: RealField, p: WaveParams) -> tuple[RealField, float]:
    """Residual of ``H psi_x + c psi - gamma d_x^{-2} psi = psi^2``.

    For ``gamma > 0`` the residual is projected onto zero mean: a zero-mean
    periodic profile cannot balance the mean of ``psi^2``.  Returns the
    residual field and ``||r|| / ||psi^2||`` (0 for the zero field).
    """
    if p.gamma > 0:
        require_zero_mean(psi, "profile")
    lin = apply_symbol(psi, lambda xi: profile_operator_symbol(xi, p))
    sq = psi * psi
    r = lin - sq
    if p.gamma > 0:
        r = project_zero_mean(r)
    denom = l2_norm(sq)
    rel = l2_norm(r) / denom if denom > 0 else 0.0
    return r, rel


def rescale_factor(gamma: float, gamma0: float) -> float:
    """Dilation factor ``a`` carrying ``(c=1, gamma)`` profiles to rotation ``gamma0``.

    If ``u`` solves the profile equation with ``(1, gamma)`` then
    ``a u(a x)`` solves it with ``(a, gamma a^3)``; matching ``gamma a^3 =
    gamma0`` gives ``a = (gamma0 / gamma)^{1/3}`` and speed ``c = a``.
    """
    if not (gamma > 0 and gamma0 > 0):
        raise ValueError("gamma and gamma0 must be positive")
    return (gamma0 / gamma) ** (1.0 / 3.0)


def dilate(u: RealField, a: float, *, min_points_per_width: float = 8.0) -> RealField:
    """Return ``v(x) = a u(a x)`` on the grid of half-length ``L / a``.

    The rescaled grid keeps ``n``, so ``v`` is sampled exactly at the images of
    the original nodes and no interpolation error enters.  Raises
    :class:`ScaleOutOfRange` if the narrowed profile (width ``~1/a``) would
    have fewer than ``min_points_per_width`` nodes across it.
    """
    if not (np.isfinite(a) and a > 0):
        raise ScaleOutOfRange(f"scale factor must be positive, got {a!r}")
    g = u.grid
    new = Grid(g.n, g.half_length / a)
    if new.dx * min_points_per_width > 1.0 / a:
        raise ScaleOutOfRange(
            f"scale {a:.4g} gives dx = {new.dx:.3e}, too coarse for width {1.0 / a:.3e}"
        )
    return RealField(new, a * u.values)


def gamma_rescale(u: RealField, gamma: float, gamma0: float) -> tuple[RealField, WaveParams]:
    """Map a ``(c=1, gamma)`` profile to the equivalent one at rotation ``gamma0``."""
    a = rescale_factor(gamma, gamma0)
    return dilate(u, a), WaveParams(c=a, gamma=gamma0)
