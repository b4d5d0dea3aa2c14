"""Periodic grid, Fourier transforms and Fourier-multiplier operators.

The real line is replaced by the periodic box ``[-L, L)`` sampled at ``n``
points.  Spectral coefficients are normalised so that ``coeff[0]`` is the
mean of the field and phases are referred to the physical coordinate ``x``
(not to the array index), so that a field which is even about ``x = 0`` has
real coefficients::

    u(x_j) = sum_k coeff[k] * exp(1j * xi[k] * x_j)

Coefficients are stored in the usual FFT order (``numpy.fft.fftfreq``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Union

import numpy as np

from .errors import NonHermitianSymbol, NonZeroMean

__all__ = [
    "Grid",
    "RealField",
    "SpectralField",
    "to_spectrum",
    "from_spectrum",
    "apply_symbol",
    "hilbert",
    "derivative",
    "half_derivative",
    "inv_derivative",
    "project_zero_mean",
    "dealias",
    "dealias_mask",
    "l2_inner",
    "l2_norm",
    "mean",
]

Symbol = Union[Callable[[np.ndarray], np.ndarray], np.ndarray]

HERMITIAN_TOL = 1e-10
MEAN_TOL = 1e-10


@dataclass(frozen=True)
class Grid:
    """Uniform periodic mesh on ``[-half_length, half_length)``.

    Attributes
    ----------
    n : int
        Number of samples, a power of two not smaller than 16.
    half_length : float
        Half of the period.
    """

    n: int
    half_length: float

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or n < 16 or n & (n - 1):
            raise ValueError(f"n must be a power of two >= 16, got {n!r}")
        if not (np.isfinite(self.half_length) and self.half_length > 0):
            raise ValueError(f"half_length must be positive, got {self.half_length!r}")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "half_length", float(self.half_length))

    @property
    def length(self) -> float:
        return 2.0 * self.half_length

    @property
    def dx(self) -> float:
        return self.length / self.n

    @cached_property
    def x(self) -> np.ndarray:
        return -self.half_length + self.dx * np.arange(self.n)

    @cached_property
    def k(self) -> np.ndarray:
        """Integer mode indices in FFT order."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n).astype(int)

    @cached_property
    def xi(self) -> np.ndarray:
        """Angular wavenumbers ``pi * k / half_length``; ``xi[0] == 0`` exactly."""
        return np.pi * self.k / self.half_length

    @cached_property
    def _phase(self) -> np.ndarray:
        # exp(1j * xi * L) = (-1)**k refers FFT phases to x = -L
        return np.where(self.k % 2 == 0, 1.0, -1.0)

    @cached_property
    def reflect_index(self) -> np.ndarray:
        """Index map ``j -> j'`` with ``x[j'] = -x[j]`` (mod the period)."""
        return (-np.arange(self.n)) % self.n

    def refined(self, factor: int = 2) -> "Grid":
        return Grid(self.n * factor, self.half_length)


@dataclass(eq=False)
class RealField:
    """Real samples of a function on a :class:`Grid`."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field samples must be finite")
        self.values = v

    @classmethod
    def from_function(cls, grid: Grid, f: Callable[[np.ndarray], np.ndarray]) -> "RealField":
        return cls(grid, f(grid.x))

    @classmethod
    def zeros(cls, grid: Grid) -> "RealField":
        return cls(grid, np.zeros(grid.n))

    def _check(self, other: "RealField") -> None:
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")

    def __add__(self, other):
        if isinstance(other, RealField):
            self._check(other)
            return RealField(self.grid, self.values + other.values)
        return RealField(self.grid, self.values + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, RealField):
            self._check(other)
            return RealField(self.grid, self.values - other.values)
        return RealField(self.grid, self.values - other)

    def __mul__(self, other):
        if isinstance(other, RealField):
            self._check(other)
            return RealField(self.grid, self.values * other.values)
        return RealField(self.grid, self.values * other)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return RealField(self.grid, self.values / scalar)

    def __neg__(self):
        return RealField(self.grid, -self.values)

    def copy(self) -> "RealField":
        return RealField(self.grid, self.values.copy())


@dataclass(eq=False)
class SpectralField:
    """Fourier coefficients of a real field, in FFT order."""

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} coefficients, got shape {c.shape}")
        self.coeffs = c

    def hermitian_defect(self) -> float:
        c = self.coeffs
        scale = max(np.max(np.abs(c)), np.finfo(float).tiny)
        return float(np.max(np.abs(c[self.grid.reflect_index] - np.conj(c))) / scale)


def to_spectrum(u: RealField) -> SpectralField:
    g = u.grid
    return SpectralField(g, np.fft.fft(u.values) * (g._phase / g.n))


def from_spectrum(U: SpectralField) -> RealField:
    g = U.grid
    return RealField(g, np.fft.ifft(U.coeffs * g._phase).real * g.n)


def _coeffs(u: RealField) -> np.ndarray:
    return np.fft.fft(u.values)


def _field(grid: Grid, raw: np.ndarray) -> RealField:
    return RealField(grid, np.fft.ifft(raw).real)


def _hermitian_check(sigma: np.ndarray, grid: Grid) -> None:
    # The Nyquist mode is its own mirror; only the real part of its image survives.
    nyq = grid.n // 2
    mirror = sigma[grid.reflect_index]
    defect = np.abs(mirror - np.conj(sigma))
    defect[nyq] = 0.0
    scale = max(1.0, float(np.max(np.abs(sigma))))
    if np.max(defect) > HERMITIAN_TOL * scale:
        raise NonHermitianSymbol(
            f"symbol violates sigma(-xi) = conj(sigma(xi)) by {np.max(defect):.3e}"
        )


def evaluate_symbol(sigma: Symbol, grid: Grid) -> np.ndarray:
    if callable(sigma):
        s = np.asarray(sigma(grid.xi), dtype=complex)
    else:
        s = np.asarray(sigma, dtype=complex)
    if s.shape == ():
        s = np.full(grid.n, complex(s))
    if s.shape != (grid.n,):
        raise ValueError(f"symbol has shape {s.shape}, expected ({grid.n},)")
    if not np.all(np.isfinite(s)):
        raise ValueError("symbol must be finite on every grid wavenumber")
    return s


def apply_symbol(u: RealField, sigma: Symbol) -> RealField:
    """Multiply the spectrum of ``u`` by ``sigma(xi)`` mode by mode.

    ``sigma`` is either a callable of the wavenumber array or an array in FFT
    order.  Raises :class:`NonHermitianSymbol` if the result would not be real.
    """
    s = evaluate_symbol(sigma, u.grid)
    _hermitian_check(s, u.grid)
    return _field(u.grid, s * _coeffs(u))


# Multiplier symbols on the grid's wavenumbers. Singular symbols are set to
# zero at xi = 0.


def hilbert_symbol(xi: np.ndarray) -> np.ndarray:
    return -1j * np.sign(xi)


def inv_derivative_symbol(xi: np.ndarray, order: int) -> np.ndarray:
    out = np.zeros(xi.shape, dtype=complex)
    nz = xi != 0
    out[nz] = (1j * xi[nz]) ** (-order)
    return out


def hilbert(u: RealField) -> RealField:
    return apply_symbol(u, hilbert_symbol)


def derivative(u: RealField, order: int = 1) -> RealField:
    return apply_symbol(u, lambda xi: (1j * xi) ** order)


def half_derivative(u: RealField) -> RealField:
    """``|D|^{1/2} u``, symbol ``|xi|^{1/2}``."""
    return apply_symbol(u, lambda xi: np.sqrt(np.abs(xi)))


def mean(u: RealField) -> float:
    return float(np.mean(u.values))


def l2_inner(u: RealField, v: RealField) -> float:
    return float(np.dot(u.values, v.values) * u.grid.dx)


def l2_norm(u: RealField) -> float:
    return float(np.sqrt(np.dot(u.values, u.values) * u.grid.dx))


def require_zero_mean(u: RealField, what: str = "field") -> None:
    m = mean(u)
    if abs(m) > MEAN_TOL * l2_norm(u):
        raise NonZeroMean(f"{what} has mean {m:.3e}; project onto zero mean first")


def inv_derivative(u: RealField, order: int = 1) -> RealField:
    """Antiderivative ``d_x^{-order} u`` on the zero-mean subspace."""
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order!r}")
    require_zero_mean(u)
    return apply_symbol(u, lambda xi: inv_derivative_symbol(xi, order))


def project_zero_mean(u: RealField) -> RealField:
    v = u.values - np.mean(u.values)
    # a second pass removes the rounding residue of the first
    v -= np.mean(v)
    return RealField(u.grid, v)


def dealias_mask(grid: Grid) -> np.ndarray:
    """Keep modes with ``|k| <= n/3`` (two-thirds rule)."""
    return np.abs(grid.k) <= grid.n / 3


def dealias(u: RealField) -> RealField:
    return _field(u.grid, _coeffs(u) * dealias_mask(u.grid))
