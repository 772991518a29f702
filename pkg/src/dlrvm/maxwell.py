"""Reduced Maxwell system on the x-grid and the Gauss-law correction.

In the 1x2v geometry ``E = (E1, E2, 0)`` and ``B = (0, 0, B3)``, so::

    dE1/dt = j1
    dE2/dt = -d_x B3 + j2
    dB3/dt = -d_x E2
    d_x E1 = n0 - rho,   n0 = mean(rho)

``rho`` and ``j`` are the electron number and flux densities (charge -1), so
the current enters Ampere's law with a plus sign.  This is the only sign
compatible with the continuity equation ``d_t rho + d_x j1 = 0``, with Gauss'
law as written and with conservation of total energy.

``B3`` lives on the half-integer time levels of the leapfrog scheme.  The
driver owns that offset; an :class:`EMField` simply stores the three arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .grid import GridSpec, implicit_diffusion_step, poisson_solve_periodic, quad_x, spectral_deriv_x


@dataclass
class EMField:
    E1: np.ndarray
    E2: np.ndarray
    B3: np.ndarray
    eps: float = 0.0

    def copy(self) -> EMField:
        return EMField(self.E1.copy(), self.E2.copy(), self.B3.copy(), self.eps)


@dataclass(frozen=True)
class GaussReport:
    l2_residual: float
    numerical_n0: float


def init_E_from_gauss(grid: GridSpec, rho: np.ndarray) -> np.ndarray:
    """Zero-mean ``E1`` with ``d_x E1 = mean(rho) - rho``."""
    k = grid.x_axis.rwavenumbers
    rhohat = np.fft.rfft(np.asarray(rho, dtype=float))
    ehat = np.zeros_like(rhohat)
    ehat[1:] = -rhohat[1:] / (1j * k[1:])
    return np.fft.irfft(ehat, n=grid.n_x)


def gauss_residual(grid: GridSpec, E1: np.ndarray, rho: np.ndarray) -> GaussReport:
    n0 = float(np.mean(rho))
    res = spectral_deriv_x(grid, E1) - n0 + rho
    return GaussReport(float(np.sqrt(quad_x(grid, res * res))), n0)


def bootstrap_half_step_B(grid: GridSpec, B0: np.ndarray, E2_0: np.ndarray, tau: float) -> np.ndarray:
    """Half forward-Euler step ``B(tau/2) = B0 - tau/2 d_x E2(0)``."""
    return B0 - 0.5 * tau * spectral_deriv_x(grid, E2_0)


def half_step_E(grid: GridSpec, field: EMField, j0, tau: float) -> EMField:
    """``E^{1/2} = E^0 + tau/2 (curl B^{1/2} + j^0)``; ``field.B3`` is ``B^{1/2}``."""
    j1, j2 = j0
    E1 = field.E1 + 0.5 * tau * j1
    E2 = field.E2 + 0.5 * tau * (j2 - spectral_deriv_x(grid, field.B3))
    return replace(field, E1=E1, E2=E2)


def advance_E(grid: GridSpec, field: EMField, j, tau: float):
    """Uncorrected full E update ``E + tau (curl B + j)``, then implicit damping."""
    j1, j2 = j
    E1 = field.E1 + tau * j1
    E2 = field.E2 + tau * (j2 - spectral_deriv_x(grid, field.B3))
    if field.eps > 0.0:
        E1 = implicit_diffusion_step(grid, E1, field.eps, tau)
        E2 = implicit_diffusion_step(grid, E2, field.eps, tau)
    return E1, E2


def advance_B(grid: GridSpec, B3: np.ndarray, E2: np.ndarray, tau: float, eps: float = 0.0) -> np.ndarray:
    B3 = B3 - tau * spectral_deriv_x(grid, E2)
    if eps > 0.0:
        B3 = implicit_diffusion_step(grid, B3, eps, tau)
    return B3


def advance_fields_staggered(grid: GridSpec, field: EMField, j_half, tau: float) -> EMField:
    """Leapfrog: ``(E^n, B^{n+1/2}) -> (E^{n+1}, B^{n+3/2})`` with ``j^{n+1/2}``."""
    E1, E2 = advance_E(grid, field, j_half, tau)
    B3 = advance_B(grid, field.B3, E2, tau, field.eps)
    return EMField(E1, E2, B3, field.eps)


def advance_fields_first_order(grid: GridSpec, field: EMField, j0, tau: float) -> EMField:
    """Non-staggered ``E^1 = E^0 + tau (curl B^0 + j^0)``, ``B^1 = B^0 - tau curl E^1``."""
    return advance_fields_staggered(grid, field, j0, tau)


def divergence_correction(grid: GridSpec, E1_bar: np.ndarray, rho_new: np.ndarray, tau: float) -> np.ndarray:
    """Project ``E1_bar`` back onto Gauss' law with a Lagrange-multiplier potential.

    Solves ``-phi'' = (n0 - rho_new - d_x E1_bar)/tau`` with ``n0`` the
    *numerical* mean of ``rho_new`` and returns ``E1_bar - tau d_x phi``.  The
    right-hand side is built from the E1 actually produced by the update, which
    equals ``(n0 - rho - d_x E^n)/tau - d_x j^{n+1/2}``
    whenever the update is undamped (see :func:`poisson_rhs_from_update`).
    """
    n0 = np.mean(rho_new)
    g = (n0 - rho_new - spectral_deriv_x(grid, E1_bar)) / tau
    phi = poisson_solve_periodic(grid, g)
    return E1_bar - tau * spectral_deriv_x(grid, phi)


def poisson_rhs_from_update(grid: GridSpec, E1_old, rho_new, j1_half, tau: float) -> np.ndarray:
    """Multiplier source written against the undamped update from ``E1_old``."""
    n0 = np.mean(rho_new)
    return (n0 - rho_new - spectral_deriv_x(grid, E1_old)) / tau - spectral_deriv_x(grid, j1_half)


def field_energies(grid: GridSpec, field: EMField, B3=None):
    """``(0.5 int |E|^2, 0.5 int B3^2)``; ``B3`` overrides the stored magnetic field."""
    B3 = field.B3 if B3 is None else B3
    ee = 0.5 * float(quad_x(grid, field.E1**2 + field.E2**2))
    em = 0.5 * float(quad_x(grid, B3**2))
    return ee, em
