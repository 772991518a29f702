"""Projector-splitting (K, S, L) substeps and the Lie / Strang time steppers.

The substep equations are the 1x2v reductions of the projected Vlasov flow
``df/dt = -v1 d_x f + E . grad_v f + B3 (v2 d_v1 - v1 d_v2) f``::

    K-step  dK_j/dt = -sum_l c1_jl d_x K_l + (c2_jl . E) K_l + c3_jl B3 K_l
    S-step  dS_ij/dt = sum_kl (c1_jl d2_ik - c2_jl . d1_ik - c3_jl d3_ik) S_kl
    L-step  dL_i/dt = -sum_k d2_ik v1 L_k + d1_ik . grad_v L_k
                      + d3_ik (v2 d_v1 - v1 d_v2) L_k

with ``f = sum_j K_j V_j`` (K-step), ``f = sum_ij X_i S_ij V_j`` (S-step) and
``f = sum_i X_i L_i`` (L-step).  Fields are frozen during every substep.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import maxwell
from .grid import GridSpec, spectral_deriv_v, spectral_deriv_x
from .lowrank import (
    CoefficientSet,
    LowRankState,
    charge_density,
    compute_c_coefficients,
    compute_d_coefficients,
    current_density,
    current_from_L,
    qr_orthonormalize,
)
from .maxwell import EMField


class NumericalInstability(FloatingPointError):
    """Non-finite values appeared inside a Runge-Kutta stage."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


@dataclass(frozen=True)
class SubstepConfig:
    n_substeps: int = 5
    rk_scheme: str = "rk4"

    def __post_init__(self):
        if int(self.n_substeps) != self.n_substeps or self.n_substeps < 1:
            raise ValueError(f"n_substeps must be a positive integer, got {self.n_substeps!r}")
        if self.rk_scheme not in _TABLEAUS:
            raise ValueError(f"rk_scheme must be one of {sorted(_TABLEAUS)}, got {self.rk_scheme!r}")


# Explicit Butcher tableaus (a, b); the Dormand-Prince pair is used with its
# 5th-order weights at a fixed step size.
_TABLEAUS = {
    "rk4": (
        [[], [0.5], [0.0, 0.5], [0.0, 0.0, 1.0]],
        [1 / 6, 1 / 3, 1 / 3, 1 / 6],
    ),
    "dopri5": (
        [
            [],
            [1 / 5],
            [3 / 40, 9 / 40],
            [44 / 45, -56 / 15, 32 / 9],
            [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
            [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
        ],
        [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
    ),
}


def integrate(rhs, y0: np.ndarray, tau: float, cfg: SubstepConfig, label: str = "substep") -> np.ndarray:
    """Fixed-step explicit Runge-Kutta for an autonomous ``y' = rhs(y)``."""
    a, b = _TABLEAUS[cfg.rk_scheme]
    h = tau / cfg.n_substeps
    y = np.array(y0, dtype=float, copy=True)
    with np.errstate(over="ignore", invalid="ignore"):
        return _rk_loop(rhs, y, h, a, b, cfg.n_substeps, label)


def _rk_loop(rhs, y, h, a, b, n_substeps, label):
    for sub in range(n_substeps):
        ks = []
        for s, row in enumerate(a):
            ys = y
            for coef, kk in zip(row, ks):
                if coef != 0.0:
                    ys = ys + (h * coef) * kk
            k = rhs(ys)
            if not np.all(np.isfinite(k)):
                raise NumericalInstability(f"non-finite value in {label} (substep {sub}, stage {s})")
            ks.append(k)
        for coef, kk in zip(b, ks):
            if coef != 0.0:
                y = y + (h * coef) * kk
    return y


# --- right-hand sides -----------------------------------------------------


def k_rhs(grid: GridSpec, c1, c2, c3, E1, E2, B3):
    # contiguous copies: strided operands make matmul fall off the BLAS path
    c2a, c2b = np.ascontiguousarray(c2[..., 0]), np.ascontiguousarray(c2[..., 1])

    def rhs(K):
        return (
            -c1 @ spectral_deriv_x(grid, K)
            + E1 * (c2a @ K)
            + E2 * (c2b @ K)
            + B3 * (c3 @ K)
        )

    return rhs


def s_rhs(coef: CoefficientSet):
    c1, c2, c3, d1, d2, d3 = coef.c1, coef.c2, coef.c3, coef.d1, coef.d2, coef.d3

    def rhs(S):
        return (
            d2 @ S @ c1.T
            - d1[..., 0] @ S @ c2[..., 0].T
            - d1[..., 1] @ S @ c2[..., 1].T
            - d3 @ S @ c3.T
        )

    return rhs


def l_rhs(grid: GridSpec, d1, d2, d3):
    r = d2.shape[0]
    d1a, d1b = np.ascontiguousarray(d1[..., 0]), np.ascontiguousarray(d1[..., 1])
    v1 = grid.v1_mesh.reshape(-1)
    v2 = grid.v2_mesh.reshape(-1)
    shape = (r, grid.n_v1, grid.n_v2)

    def rhs(L):
        D1 = spectral_deriv_v(grid, L, "v1").reshape(r, -1)
        D2 = spectral_deriv_v(grid, L, "v2").reshape(r, -1)
        Lf = L.reshape(r, -1)
        out = d1a @ D1 + d1b @ D2
        out += v2 * (d3 @ D1)
        out -= v1 * (d2 @ Lf + d3 @ D2)
        return out.reshape(shape)

    return rhs


# --- substeps ---------------------------------------------------------------


def k_step(state: LowRankState, field: EMField, tau: float, cfg: SubstepConfig = SubstepConfig()) -> LowRankState:
    """Evolve ``K = S^T X`` with ``V`` frozen, then refactor ``K`` into ``(X, S)``."""
    g = state.grid
    c1, c2, c3 = compute_c_coefficients(state.V, g)
    K = integrate(k_rhs(g, c1, c2, c3, field.E1, field.E2, field.B3), state.S.T @ state.X, tau, cfg, "K-step")
    X, R, _ = qr_orthonormalize(K, g.h_x)
    return LowRankState(X, R.T, state.V.copy(), g)


def s_step(S: np.ndarray, coef: CoefficientSet, tau: float, cfg: SubstepConfig = SubstepConfig()) -> np.ndarray:
    """Integrate the coupling-matrix equation (the backward middle flow) over ``tau``."""
    return integrate(s_rhs(coef), S, tau, cfg, "S-step")


def l_step(
    state: LowRankState,
    field: EMField,
    tau: float,
    cfg: SubstepConfig = SubstepConfig(),
    with_half: bool = False,
):
    """Evolve ``L = S V`` with ``X`` frozen, then refactor ``L`` into ``(S, V)``.

    With ``with_half=True`` also returns ``L(tau/2)``, integrated separately
    from the same initial value.
    """
    g = state.grid
    d1, d2, d3 = compute_d_coefficients(state.X, field.E1, field.E2, field.B3, g)
    rhs = l_rhs(g, d1, d2, d3)
    L0 = np.tensordot(state.S, state.V, axes=1)
    L = integrate(rhs, L0, tau, cfg, "L-step")
    V, S, _ = qr_orthonormalize(L, g.w_v)
    new = LowRankState(state.X.copy(), S, V, g)
    if with_half:
        return new, integrate(rhs, L0, 0.5 * tau, cfg, "L-step")
    return new


def lie_step(
    state: LowRankState, field: EMField, tau: float, cfg: SubstepConfig = SubstepConfig()
) -> tuple[LowRankState, EMField]:
    """First-order K, S, L sequence with fields frozen at the step start."""
    g = state.grid
    j0 = current_density(state)
    st = k_step(state, field, tau, cfg)
    coef = _coefficients(st, field)
    st = LowRankState(st.X, s_step(st.S, coef, tau, cfg), st.V, g)
    st = l_step(st, field, tau, cfg)
    return st, maxwell.advance_fields_first_order(g, field, j0, tau)


def _coefficients(state: LowRankState, field: EMField) -> CoefficientSet:
    g = state.grid
    return CoefficientSet(
        *compute_c_coefficients(state.V, g),
        *compute_d_coefficients(state.X, field.E1, field.E2, field.B3, g),
    )


def strang_step(
    state: LowRankState,
    field: EMField,
    tau: float,
    cfg: SubstepConfig = SubstepConfig(),
    correct_divergence: bool = False,
) -> tuple[LowRankState, EMField]:
    """One second-order step.

    ``field`` holds ``E^n`` and ``B^{n+1/2}``; the result holds ``E^{n+1}``
    and ``B^{n+3/2}``.  With ``correct_divergence`` the new E1 is projected
    onto Gauss' law for the charge density of the new low-rank state.
    """
    g = state.grid
    half = 0.5 * tau

    j0 = current_density(state)
    fh = maxwell.half_step_E(g, field, j0, tau)
    E1h, E2h, B3h = fh.E1, fh.E2, fh.B3

    # K(tau/2), QR
    c1, c2, c3 = compute_c_coefficients(state.V, g)
    K = integrate(k_rhs(g, c1, c2, c3, E1h, E2h, B3h), state.S.T @ state.X, half, cfg, "K-step")
    X_half, R, _ = qr_orthonormalize(K, g.h_x)
    S = R.T

    # S(tau/2)
    d1, d2, d3 = compute_d_coefficients(X_half, E1h, E2h, B3h, g)
    S = integrate(s_rhs(CoefficientSet(c1, c2, c3, d1, d2, d3)), S, half, cfg, "S-step")

    # L(tau/2) for the mid-step current, L(tau) from the same start, QR
    lr = l_rhs(g, d1, d2, d3)
    L0 = np.tensordot(S, state.V, axes=1)
    L_half = integrate(lr, L0, half, cfg, "L-step")
    j_half = current_from_L(X_half, L_half, g)
    L = integrate(lr, L0, tau, cfg, "L-step")
    V_new, S, _ = qr_orthonormalize(L, g.w_v)

    # S(tau/2), K(tau/2), QR
    c1, c2, c3 = compute_c_coefficients(V_new, g)
    S = integrate(s_rhs(CoefficientSet(c1, c2, c3, d1, d2, d3)), S, half, cfg, "S-step")
    K = integrate(k_rhs(g, c1, c2, c3, E1h, E2h, B3h), S.T @ X_half, half, cfg, "K-step")
    X_new, R, _ = qr_orthonormalize(K, g.h_x)
    new = LowRankState(X_new, R.T, V_new, g)

    E1, E2 = maxwell.advance_E(g, field, j_half, tau)
    if correct_divergence:
        E1 = maxwell.divergence_correction(g, E1, charge_density(new), tau)
    B3 = maxwell.advance_B(g, field.B3, E2, tau, field.eps)
    return new, EMField(E1, E2, B3, field.eps)
