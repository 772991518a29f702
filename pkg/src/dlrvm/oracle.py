"""Brute-force full-tensor Vlasov-Maxwell stepper used as a reference on small grids.

The whole phase-space right-hand side is integrated in one unsplit
Runge-Kutta flow; the Maxwell part is the same leapfrog as the low-rank
path, so differences isolate the low-rank projection and the K/S/L splitting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import maxwell
from .grid import GridSpec, spectral_deriv_v, spectral_deriv_x
from .integrator import SubstepConfig, integrate
from .lowrank import MAX_FULL_ENTRIES, LowRankState, reconstruct_full
from .maxwell import EMField


@dataclass
class FullTensorState:
    f: np.ndarray
    grid: GridSpec

    def __post_init__(self):
        g = self.grid
        if g.full_size > MAX_FULL_ENTRIES:
            raise ValueError(f"full tensor of {g.full_size} entries exceeds the 2**24 oracle limit")
        if self.f.shape != (g.n_x, g.n_v1, g.n_v2):
            raise ValueError(f"f must have shape {(g.n_x, g.n_v1, g.n_v2)}, got {self.f.shape}")

    @classmethod
    def from_lowrank(cls, state: LowRankState) -> FullTensorState:
        return cls(reconstruct_full(state), state.grid)


def moments_full(f: np.ndarray, grid: GridSpec):
    """``(rho, j1, j2)`` of a full tensor by direct quadrature."""
    w = grid.w_v
    rho = w * f.sum(axis=(1, 2))
    j1 = w * np.einsum("xab,a->x", f, grid.v1)
    j2 = w * np.einsum("xab,b->x", f, grid.v2)
    return rho, j1, j2


def full_kinetic_energy(f: np.ndarray, grid: GridSpec) -> float:
    vv = grid.v1_mesh**2 + grid.v2_mesh**2
    return 0.5 * grid.h_x * grid.w_v * float(np.einsum("xab,ab->", f, vv))


def full_mass(f: np.ndarray, grid: GridSpec) -> float:
    return grid.h_x * grid.w_v * float(f.sum())


def vlasov_rhs(grid: GridSpec, E1, E2, B3):
    """``f -> -v1 d_x f + E . grad_v f + B3 (v2 d_v1 - v1 d_v2) f`` on the full tensor."""
    v1 = grid.v1_mesh
    v2 = grid.v2_mesh
    E1 = np.asarray(E1)[:, None, None]
    E2 = np.asarray(E2)[:, None, None]
    B3 = np.asarray(B3)[:, None, None]

    def rhs(f):
        dx = np.moveaxis(spectral_deriv_x(grid, np.moveaxis(f, 0, -1)), -1, 0)
        d1 = spectral_deriv_v(grid, f, "v1")
        d2 = spectral_deriv_v(grid, f, "v2")
        return -v1 * dx + (E1 + B3 * v2) * d1 + (E2 - B3 * v1) * d2

    return rhs


def oracle_strang_step(
    state: FullTensorState,
    field: EMField,
    tau: float,
    cfg: SubstepConfig = SubstepConfig(),
    correct_divergence: bool = False,
) -> tuple[FullTensorState, EMField]:
    """``(f^n, E^n, B^{n+1/2}) -> (f^{n+1}, E^{n+1}, B^{n+3/2})`` without projection."""
    g = state.grid
    _, j1, j2 = moments_full(state.f, g)
    fh = maxwell.half_step_E(g, field, (j1, j2), tau)
    rhs = vlasov_rhs(g, fh.E1, fh.E2, fh.B3)
    f_half = integrate(rhs, state.f, 0.5 * tau, cfg, "oracle")
    _, j1h, j2h = moments_full(f_half, g)
    f_new = integrate(rhs, f_half, 0.5 * tau, cfg, "oracle")

    E1, E2 = maxwell.advance_E(g, field, (j1h, j2h), tau)
    if correct_divergence:
        E1 = maxwell.divergence_correction(g, E1, moments_full(f_new, g)[0], tau)
    B3 = maxwell.advance_B(g, field.B3, E2, tau, field.eps)
    return FullTensorState(f_new, g), EMField(E1, E2, B3, field.eps)
