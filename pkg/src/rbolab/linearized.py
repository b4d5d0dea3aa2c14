"""Linearized operator around a solitary wave and its projected spectrum.

``l v = -gamma d_x^{-2} v + H v_x + c v - nl_coeff * psi v``.  With the
nonlinearity ``psi^2`` of the profile equation the second variation has
``nl_coeff = 2``; ``nl_coeff = 1`` is the variant that goes with ``psi^2/2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg
from scipy.linalg import circulant

from .errors import AssemblyTooLarge, EigSolverFailure
from .functionals import WaveParams, mass_V
from .soliton import SolitonSpec, bo_soliton, bo_soliton_dc, profile_operator_symbol
from .spectral import (
    Grid,
    RealField,
    apply_symbol,
    dealias,
    derivative,
    l2_inner,
    l2_norm,
    project_zero_mean,
    require_zero_mean,
)

__all__ = [
    "LinearizedOp",
    "SpectrumReport",
    "apply_linearized",
    "quad_form",
    "assemble_matrix",
    "projected_min_eigenvalue",
    "dmass_dc",
    "MAX_ASSEMBLY_N",
]

MAX_ASSEMBLY_N = 4096


@dataclass(frozen=True, eq=False)
class LinearizedOp:
    psi: RealField
    params: WaveParams
    nl_coeff: float = 2.0

    def __post_init__(self):
        if self.nl_coeff not in (1, 2):
            raise ValueError(f"nl_coeff must be 1 or 2, got {self.nl_coeff!r}")
        if self.params.gamma > 0:
            require_zero_mean(self.psi, "profile")

    @property
    def grid(self) -> Grid:
        return self.psi.grid


@dataclass(frozen=True)
class SpectrumReport:
    min_eig_projected: float
    kernel_residual: float
    dc_identity_residual: float
    raw_min_eig: float
    degenerate: bool = False
    n_constraints: int = 0


def apply_linearized(op: LinearizedOp, v: RealField) -> RealField:
    p = op.params
    if p.gamma > 0:
        require_zero_mean(v)
    lin = apply_symbol(v, lambda xi: profile_operator_symbol(xi, p))
    return lin - op.nl_coeff * dealias(op.psi * v)


def quad_form(op: LinearizedOp, v: RealField) -> float:
    """``<l v, v>`` in the discrete L^2 pairing."""
    return l2_inner(apply_linearized(op, v), v)


def _kernel_from_symbol(sym: np.ndarray) -> np.ndarray:
    # circulant(h)[i, j] = h[(i - j) % n] realises the multiplier
    return np.fft.ifft(sym).real


def assemble_matrix(op: LinearizedOp) -> np.ndarray:
    """Dense matrix of ``l`` acting on grid samples (symmetrised).

    The multiplier part is circulant.  The product term ``P diag(psi)`` is not
    symmetric under the plain two-thirds projector ``P``; the symmetric part
    is returned, which agrees with ``l`` on band-limited fields.
    """
    g = op.grid
    if g.n > MAX_ASSEMBLY_N:
        raise AssemblyTooLarge(f"dense assembly limited to n <= {MAX_ASSEMBLY_N}, got {g.n}")
    sym = profile_operator_symbol(g.xi, op.params).real
    A = circulant(_kernel_from_symbol(sym))
    mask = (np.abs(g.k) <= g.n / 3).astype(float)
    P = circulant(_kernel_from_symbol(mask))
    A -= op.nl_coeff * (P * op.psi.values[None, :])
    return 0.5 * (A + A.T)


def _h_half_gram(g: Grid) -> np.ndarray:
    return circulant(_kernel_from_symbol(np.sqrt(1.0 + g.xi ** 2)))


def _min_generalized(A: np.ndarray, B: np.ndarray) -> float:
    try:
        w = scipy.linalg.eigh(A, B, eigvals_only=True, subset_by_index=[0, 0])
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigSolverFailure(str(exc)) from exc
    if not np.all(np.isfinite(w)):
        raise EigSolverFailure("non-finite eigenvalue")
    return float(w[0])


def _complement_basis(vectors: list) -> np.ndarray:
    n = vectors[0].size
    C = np.column_stack(vectors)
    return scipy.linalg.null_space(C.T, rcond=1e-10) if C.size else np.eye(n)


def projected_min_eigenvalue(op: LinearizedOp, constraints: Sequence[RealField]) -> SpectrumReport:
    """Smallest ``alpha`` with ``l v = alpha W v`` on ``span(constraints)^perp``.

    ``W`` is the Gram operator of the ``H^{1/2}`` norm (weight
    ``(1 + xi^2)^{1/2}``), so ``alpha`` is the best constant in
    ``<l v, v> >= alpha ||v||_{H^{1/2}}^2`` over the constrained space.  For
    ``gamma > 0`` constants are always projected out.  The unprojected value
    keeps only that mean constraint.
    """
    g = op.grid
    A = assemble_matrix(op)
    W = _h_half_gram(g)

    base = [np.ones(g.n)] if op.params.gamma > 0 else []
    cons = [np.asarray(c.values, float) for c in constraints]
    if any(not np.any(c) for c in cons):
        raise ValueError("constraints must be nonzero")

    Z0 = _complement_basis(base) if base else np.eye(g.n)
    raw = _min_generalized(Z0.T @ A @ Z0, Z0.T @ W @ Z0)

    Z = _complement_basis(base + cons) if (base + cons) else np.eye(g.n)
    if Z.shape[1] == 0:
        proj, degenerate = 0.0, True
    else:
        proj, degenerate = _min_generalized(Z.T @ A @ Z, Z.T @ W @ Z), False

    return SpectrumReport(
        min_eig_projected=proj,
        kernel_residual=_kernel_residual(op),
        dc_identity_residual=_dc_identity_residual(op),
        raw_min_eig=raw,
        degenerate=degenerate,
        n_constraints=len(cons),
    )


def _kernel_residual(op: LinearizedOp) -> float:
    dpsi = derivative(op.psi)
    return l2_norm(apply_linearized(op, dpsi)) / l2_norm(dpsi)


def _dc_identity_residual(op: LinearizedOp) -> float:
    """``||l dQ_c/dc + psi|| / ||psi||`` with the closed-form c-derivative.

    Around ``Q_c`` itself (``gamma = 0``) this measures ``l dQ/dc = -Q``; around
    a rotating profile it measures how far that identity is perturbed.
    """
    g, p = op.grid, op.params
    dq = bo_soliton_dc(p.c, g)
    psi = op.psi
    if p.gamma > 0:
        dq = project_zero_mean(dq)
    lv = apply_linearized(op, dq)
    return l2_norm(lv + psi) / l2_norm(psi)


def dmass_dc(c: float, h: float, grid: Grid | None = None) -> float:
    """Central difference of ``c -> ||Q_c||^2`` (default grid n=4096, L=128)."""
    if not c > h > 0:
        raise ValueError("need c > h > 0")
    g = grid or Grid(4096, 128.0)
    vp = mass_V(bo_soliton(SolitonSpec(c + h), g))
    vm = mass_V(bo_soliton(SolitonSpec(c - h), g))
    return (vp - vm) / (2.0 * h)
