"""Even ground states of the rotation Benjamin-Ono profile equation.

The profile equation ``H psi_x + c psi - gamma d_x^{-2} psi = psi^2`` is
written ``L psi = psi^2`` with ``L`` the positive multiplier
``|xi| + c + gamma / xi^2``.  It is solved by Petviashvili's stabilised
fixed-point iteration

    psi_{n+1} = M_n^alpha L^{-1} P(psi_n^2),
    M_n = <L psi_n, psi_n> / <psi_n^2, psi_n>,

where ``P`` removes the mean when ``gamma > 0`` (identity otherwise).  The
square is taken pointwise on the grid (collocation), so the fixed point
satisfies the discrete profile equation to rounding.  Every iterate is
projected onto even fields, so the translation mode never enters.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Sequence, Union

import numpy as np

from .errors import Blowup, DegenerateSeed, NonConvergence, NonPositiveK, NumericalFailure
from .functionals import FunctionalRecord, WaveParams, constraint_K, functional_record
from .soliton import SolitonSpec, bo_soliton, profile_operator_symbol, rbo_residual
from .spectral import Grid, RealField, project_zero_mean

__all__ = [
    "SolverOptions",
    "GroundState",
    "petviashvili_solve",
    "normalize_to_k",
    "continue_in_gamma",
    "even_project",
    "center_even",
    "seed_profile",
]

log = logging.getLogger(__name__)

Seed = Union[str, RealField]


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-10
    max_iter: int = 500
    stabilizer_exponent: float = 2.0
    init: Seed = "soliton"
    damping: float = 1.0
    check_invariants: bool = False

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not 1.0 <= self.stabilizer_exponent <= 3.0:
            raise ValueError("stabilizer_exponent must lie in [1, 3]")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not 0.0 < self.damping <= 1.0:
            raise ValueError("damping must lie in (0, 1]")


@dataclass(eq=False)
class GroundState:
    psi: RealField
    params: WaveParams
    residual_rel: float
    iterations: int
    functionals: FunctionalRecord
    stabilizer_history: list = field(default_factory=list)

    @property
    def grid(self) -> Grid:
        return self.psi.grid


def even_project(u: RealField) -> RealField:
    """``(u(x) + u(-x)) / 2`` using the grid's reflection ``x_j -> x_{-j}``."""
    v = u.values
    return RealField(u.grid, 0.5 * (v + v[u.grid.reflect_index]))


def center_even(u: RealField) -> RealField:
    """Move an even profile so that its peak sits at ``x = 0``.

    Even fields are symmetric about both ``0`` and the box edge; if the
    largest magnitude is nearer the edge the field is rolled by half a period.
    """
    j = int(np.argmax(np.abs(u.values)))
    if abs(u.grid.x[j]) > 0.5 * u.grid.half_length:
        return RealField(u.grid, np.roll(u.values, u.grid.n // 2))
    return u


def seed_profile(kind: Seed, p: WaveParams, g: Grid) -> RealField:
    if isinstance(kind, RealField):
        if kind.grid != g:
            raise ValueError("seed lives on a different grid")
        return kind.copy()
    x, c = g.x, p.c
    if kind == "soliton":
        return bo_soliton(SolitonSpec(c), g)
    if kind == "gaussian":
        return RealField(g, 2.0 * c * np.exp(-0.5 * x ** 2))
    if kind == "sech2":
        return RealField(g, 2.0 * c / np.cosh(c * x) ** 2)
    raise ValueError(f"unknown seed {kind!r}")


def _admissible(u: RealField, p: WaveParams) -> RealField:
    u = even_project(u)
    return project_zero_mean(u) if p.gamma > 0 else u


def petviashvili_solve(p: WaveParams, g: Grid, opts: SolverOptions = SolverOptions()) -> GroundState:
    """Solve the profile equation on ``g`` for even ``psi``.

    Raises
    ------
    DegenerateSeed
        If ``int psi^3 <= 0`` at some iterate (no positive branch to follow).
    Blowup
        If an iterate becomes non-finite.
    NonConvergence
        If ``opts.max_iter`` iterations do not reach ``opts.tol``.
    """
    n, dx = g.n, g.dx
    s = profile_operator_symbol(g.xi, p).real
    if p.gamma > 0:
        apply_inv = np.zeros(n)
        apply_inv[1:] = 1.0 / s[1:]
    else:
        apply_inv = 1.0 / s
    refl = g.reflect_index
    alpha = opts.stabilizer_exponent
    theta = opts.damping

    psi = _admissible(seed_profile(opts.init, p, g), p).values
    history = []
    change = np.inf
    for it in range(1, opts.max_iter + 1):
        F = np.fft.fft(psi)
        lin = float(np.sum(s * np.abs(F) ** 2) / n * dx)
        cub = float(np.sum(psi ** 3) * dx)
        if not (np.isfinite(lin) and np.isfinite(cub)):
            raise Blowup(f"non-finite iterate at iteration {it}")
        if cub <= 0:
            raise DegenerateSeed(f"<psi^2, psi> = {cub:.3e} <= 0 at iteration {it}")
        M = lin / cub
        history.append(M)
        new = M ** alpha * np.fft.ifft(apply_inv * np.fft.fft(psi * psi)).real
        new = 0.5 * (new + new[refl])
        if p.gamma > 0:
            new -= new.mean()
        if theta != 1.0:
            new = (1.0 - theta) * psi + theta * new
        if not np.all(np.isfinite(new)):
            raise Blowup(f"non-finite iterate at iteration {it}")
        if opts.check_invariants:
            scale = np.max(np.abs(new))
            assert np.max(np.abs(new - new[refl])) <= 1e-12 * scale
            if p.gamma > 0:
                assert abs(new.mean()) <= 1e-12 * scale
        norm = np.linalg.norm(new)
        change = np.linalg.norm(new - psi) / norm if norm > 0 else np.inf
        psi = new
        if change <= opts.tol:
            field_ = RealField(g, psi)
            _, res = rbo_residual(field_, p)
            if res <= opts.tol and abs(M - 1.0) <= 1e-8:
                log.debug("converged (c=%g, gamma=%g) in %d iterations", p.c, p.gamma, it)
                return GroundState(
                    psi=field_,
                    params=p,
                    residual_rel=res,
                    iterations=it,
                    functionals=functional_record(field_, p),
                    stabilizer_history=history,
                )
    _, res = rbo_residual(RealField(g, psi), p)
    raise NonConvergence(
        f"no convergence in {opts.max_iter} iterations (c={p.c}, gamma={p.gamma}): "
        f"change {change:.3e}, residual {res:.3e}"
    )


def normalize_to_k(psi: RealField, lam: float) -> RealField:
    """Scale ``psi`` so that ``K = lam``: ``(lam / K(psi))^{1/3} psi``."""
    k = constraint_K(psi)
    if not k > 0:
        raise NonPositiveK(f"K(psi) = {k:.6e} must be positive")
    if not lam > 0:
        raise NonPositiveK(f"target K = {lam!r} must be positive")
    return psi * (lam / k) ** (1.0 / 3.0)


def continue_in_gamma(c: float, gammas: Sequence[float], g: Grid,
                      opts: SolverOptions = SolverOptions()) -> list[GroundState]:
    """Solve along decreasing ``gammas``, warm-starting from the previous state.

    The first solve uses ``opts.init``.  A solver failure is re-raised with the
    offending value attached as ``exc.gamma``.
    """
    gammas = [float(x) for x in gammas]
    if any(x <= 0 for x in gammas):
        raise ValueError("gammas must be positive")
    if any(b >= a for a, b in zip(gammas, gammas[1:])):
        raise ValueError("gammas must be strictly decreasing")
    out: list[GroundState] = []
    current = opts
    for gam in gammas:
        try:
            gs = petviashvili_solve(WaveParams(c, gam), g, current)
        except NumericalFailure as exc:
            exc.gamma = gam
            exc.args = (f"gamma={gam}: {exc.args[0] if exc.args else ''}",)
            raise
        out.append(gs)
        current = replace(opts, init=gs.psi)
    return out
