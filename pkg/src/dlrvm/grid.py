"""Uniform periodic phase-space grids, quadrature and Fourier kernels.

Every axis uses the left-closed, right-open convention: point ``i`` sits at
``a + i*h`` with ``h = (b - a)/n``.  Grid functions are plain numpy arrays:

* x-grid functions have shape ``(..., n_x)``;
* v-grid functions have shape ``(..., n_v1, n_v2)``, i.e. the flat row-major
  (v1-major) layout of length ``n_v1*n_v2`` viewed as a 2D array.

All kernels act on the trailing axes, so stacks of ``r`` basis functions are
handled in a single call.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class Axis:
    """One periodic axis ``[a, b)`` with ``n`` points."""

    a: float
    b: float
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise GridError(f"axis point count must be a positive integer, got {self.n!r}")
        if not self.b > self.a:
            raise GridError(f"axis interval must satisfy a < b, got [{self.a}, {self.b})")

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def h(self) -> float:
        return self.length / self.n

    @cached_property
    def points(self) -> np.ndarray:
        return self.a + self.h * np.arange(self.n)

    @cached_property
    def rwavenumbers(self) -> np.ndarray:
        """Angular wavenumbers matching ``np.fft.rfft`` output."""
        return 2.0 * np.pi * np.fft.rfftfreq(self.n, d=self.h)


@dataclass(frozen=True)
class GridSpec:
    """Tensor grid ``x x v1 x v2`` for the 1x2v phase space.

    ``n_x`` must be odd: with an even count the Nyquist coefficient of a real
    transform cannot carry the imaginary part produced by ``d/dx``, and the
    resulting error grows in time inside the Gauss-law correction.
    """

    n_x: int
    n_v1: int
    n_v2: int
    x_domain: tuple[float, float]
    v1_domain: tuple[float, float]
    v2_domain: tuple[float, float]
    x_axis: Axis = field(init=False, repr=False, compare=False)
    v1_axis: Axis = field(init=False, repr=False, compare=False)
    v2_axis: Axis = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.n_x) != self.n_x or self.n_x < 1:
            raise GridError(f"n_x must be a positive integer, got {self.n_x!r}")
        if self.n_x % 2 == 0:
            raise GridError(
                f"n_x must be odd (got {self.n_x}): an even x-grid loses the Nyquist "
                "mode of the spectral derivative, use an odd number of grid points"
            )
        object.__setattr__(self, "x_axis", Axis(*map(float, self.x_domain), int(self.n_x)))
        object.__setattr__(self, "v1_axis", Axis(*map(float, self.v1_domain), int(self.n_v1)))
        object.__setattr__(self, "v2_axis", Axis(*map(float, self.v2_domain), int(self.n_v2)))

    @property
    def h_x(self) -> float:
        return self.x_axis.h

    @property
    def h_v1(self) -> float:
        return self.v1_axis.h

    @property
    def h_v2(self) -> float:
        return self.v2_axis.h

    @property
    def w_v(self) -> float:
        """Quadrature weight of a velocity cell."""
        return self.h_v1 * self.h_v2

    @property
    def L_x(self) -> float:
        return self.x_axis.length

    @property
    def x(self) -> np.ndarray:
        return self.x_axis.points

    @property
    def v1(self) -> np.ndarray:
        return self.v1_axis.points

    @property
    def v2(self) -> np.ndarray:
        return self.v2_axis.points

    @cached_property
    def v1_mesh(self) -> np.ndarray:
        return np.broadcast_to(self.v1[:, None], (self.n_v1, self.n_v2))

    @cached_property
    def v2_mesh(self) -> np.ndarray:
        return np.broadcast_to(self.v2[None, :], (self.n_v1, self.n_v2))

    @property
    def n_v(self) -> int:
        return self.n_v1 * self.n_v2

    @property
    def full_size(self) -> int:
        return self.n_x * self.n_v


# --- quadrature -----------------------------------------------------------


def quad_x(grid: GridSpec, u):
    """Rectangle rule over x (trailing axis)."""
    return grid.h_x * np.sum(u, axis=-1)


def quad_v(grid: GridSpec, u):
    """Rectangle rule over (v1, v2) (two trailing axes)."""
    return grid.w_v * np.sum(u, axis=(-2, -1))


# --- Fourier kernels ------------------------------------------------------


def _multiply(u: np.ndarray, axis: int, symbol: np.ndarray) -> np.ndarray:
    n = u.shape[axis]
    shape = [1] * u.ndim
    shape[axis] = symbol.size
    uhat = np.fft.rfft(u, axis=axis)
    uhat *= symbol.reshape(shape)
    return np.fft.irfft(uhat, n=n, axis=axis)


def _deriv_symbol(axis: Axis, order: int) -> np.ndarray:
    ik = 1j * axis.rwavenumbers
    if order == 1 and axis.n % 2 == 0:
        # the Nyquist mode of an odd derivative is not representable
        ik = ik.copy()
        ik[-1] = 0.0
    return ik**order


def spectral_deriv_x(grid: GridSpec, u: np.ndarray, order: int = 1) -> np.ndarray:
    """``d^order u / dx^order`` by Fourier multiplication, order 1 or 2."""
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    return _multiply(np.asarray(u, dtype=float), -1, _deriv_symbol(grid.x_axis, order))


def spectral_deriv_v(grid: GridSpec, u: np.ndarray, axis: str | int) -> np.ndarray:
    """Partial derivative along ``v1`` or ``v2`` of a (stack of) v-grid function(s)."""
    if axis in ("v1", 0):
        return _multiply(np.asarray(u, dtype=float), -2, _deriv_symbol(grid.v1_axis, 1))
    if axis in ("v2", 1):
        return _multiply(np.asarray(u, dtype=float), -1, _deriv_symbol(grid.v2_axis, 1))
    raise ValueError(f"axis must be 'v1' or 'v2', got {axis!r}")


def poisson_solve_periodic(grid: GridSpec, g: np.ndarray) -> np.ndarray:
    """Zero-mean solution of ``-phi'' = g - mean(g)`` on the periodic x-grid."""
    k = grid.x_axis.rwavenumbers
    ghat = np.fft.rfft(np.asarray(g, dtype=float), axis=-1)
    phihat = np.zeros_like(ghat)
    phihat[..., 1:] = ghat[..., 1:] / k[1:] ** 2
    return np.fft.irfft(phihat, n=grid.n_x, axis=-1)


def implicit_diffusion_step(grid: GridSpec, u: np.ndarray, eps: float, tau: float) -> np.ndarray:
    """Backward-Euler diffusion ``(I - tau*eps*d_xx)^{-1} u``."""
    u = np.asarray(u, dtype=float)
    if eps == 0.0:
        return u.copy()
    k = grid.x_axis.rwavenumbers
    return _multiply(u, -1, 1.0 / (1.0 + tau * eps * k**2))
