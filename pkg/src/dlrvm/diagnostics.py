"""Per-step diagnostics: mass, energies, Gauss residual, sigma_min, Fourier modes."""

from __future__ import annotations

from dataclasses import astuple, dataclass, fields

import numpy as np

from . import lowrank
from .grid import GridSpec
from .lowrank import LowRankState, charge_density
from .maxwell import EMField, field_energies, gauss_residual


@dataclass(frozen=True)
class DiagnosticsRecord:
    time: float
    mass: float
    electric_energy: float
    magnetic_energy: float
    kinetic_energy: float
    total_energy: float
    gauss_l2: float
    sigma_min: float
    mode1_E1: float
    mode1_E2: float
    mode1_B3: float

    @classmethod
    def names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def values(self) -> tuple:
        return astuple(self)


def mass(state: LowRankState) -> float:
    return lowrank.mass(state)


def energies(state: LowRankState, field: EMField, B3=None):
    """``(electric, magnetic, kinetic)``; ``B3`` overrides the stored magnetic field."""
    ee, em = field_energies(state.grid, field, B3)
    return ee, em, lowrank.kinetic_energy(state)


def relative_errors(record: DiagnosticsRecord, reference: DiagnosticsRecord):
    """``(|m - m0|/m0, |E_tot - E_tot0|/E_tot0)``."""
    if reference.mass == 0.0 or reference.total_energy == 0.0:
        raise ZeroDivisionError("reference record has zero mass or zero total energy")
    return (
        abs(record.mass - reference.mass) / abs(reference.mass),
        abs(record.total_energy - reference.total_energy) / abs(reference.total_energy),
    )


def sigma_min(S: np.ndarray) -> float:
    return float(np.linalg.svd(S, compute_uv=False)[-1])


def fourier_mode_amplitude(u: np.ndarray, mode: int) -> float:
    """``|u_hat[mode]| / n``; a cosine of amplitude ``A`` on its period reports ``A/2``."""
    n = u.shape[-1]
    if mode < 0 or mode >= n / 2:
        raise ValueError(f"mode must satisfy 0 <= mode < n/2 = {n / 2}, got {mode}")
    return float(np.abs(np.fft.rfft(u)[mode]) / n)


def record(time: float, state: LowRankState, field: EMField, B3=None, rho=None) -> DiagnosticsRecord:
    """Evaluate every diagnostic for a low-rank state.

    ``B3`` lets the driver pass the magnetic field interpolated to the integer
    time level, since ``field.B3`` is stored half a step ahead.
    """
    g = state.grid
    B3 = field.B3 if B3 is None else B3
    rho = charge_density(state) if rho is None else rho
    ee, em, ek = energies(state, field, B3)
    return DiagnosticsRecord(
        time=float(time),
        mass=mass(state),
        electric_energy=ee,
        magnetic_energy=em,
        kinetic_energy=ek,
        total_energy=ee + em + ek,
        gauss_l2=gauss_residual(g, field.E1, rho).l2_residual,
        sigma_min=sigma_min(state.S),
        mode1_E1=fourier_mode_amplitude(field.E1, 1),
        mode1_E2=fourier_mode_amplitude(field.E2, 1),
        mode1_B3=fourier_mode_amplitude(B3, 1),
    )


def record_full(time: float, f: np.ndarray, grid: GridSpec, field: EMField, B3=None) -> DiagnosticsRecord:
    """Same diagnostics for a full phase-space tensor ``f[x, v1, v2]``."""
    from .oracle import full_kinetic_energy, moments_full

    B3 = field.B3 if B3 is None else B3
    rho, _, _ = moments_full(f, grid)
    ee, em = field_energies(grid, field, B3)
    ek = full_kinetic_energy(f, grid)
    sv = np.linalg.svd(np.sqrt(grid.h_x * grid.w_v) * f.reshape(grid.n_x, -1), compute_uv=False)
    return DiagnosticsRecord(
        time=float(time),
        mass=float(grid.h_x * np.sum(rho)),
        electric_energy=ee,
        magnetic_energy=em,
        kinetic_energy=ek,
        total_energy=ee + em + ek,
        gauss_l2=gauss_residual(grid, field.E1, rho).l2_residual,
        sigma_min=float(sv[-1]),
        mode1_E1=fourier_mode_amplitude(field.E1, 1),
        mode1_E2=fourier_mode_amplitude(field.E2, 1),
        mode1_B3=fourier_mode_amplitude(B3, 1),
    )
