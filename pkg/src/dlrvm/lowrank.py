"""Low-rank factorization ``f(x, v) = sum_ij X_i(x) S_ij V_j(v)`` and its moments.

``X`` has shape ``(r, n_x)``, ``S`` is ``(r, r)`` and ``V`` has shape
``(r, n_v1, n_v2)``.  Orthonormality is with respect to the discrete
(rectangle-rule) inner products of the grid, so ``h_x * X @ X.T = I`` and
``h_v1*h_v2 * V @ V.T = I`` with ``V`` flattened.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridSpec, quad_v, quad_x, spectral_deriv_v, spectral_deriv_x

MAX_FULL_ENTRIES = 2**24
PIVOT_RTOL = 1e-14


@dataclass
class LowRankState:
    X: np.ndarray
    S: np.ndarray
    V: np.ndarray
    grid: GridSpec

    def __post_init__(self):
        r = self.S.shape[0]
        g = self.grid
        if self.S.shape != (r, r):
            raise ValueError(f"S must be square, got shape {self.S.shape}")
        if self.X.shape != (r, g.n_x):
            raise ValueError(f"X must have shape {(r, g.n_x)}, got {self.X.shape}")
        if self.V.shape != (r, g.n_v1, g.n_v2):
            raise ValueError(f"V must have shape {(r, g.n_v1, g.n_v2)}, got {self.V.shape}")
        if r > min(g.n_x, g.n_v):
            raise ValueError(f"rank {r} exceeds min(n_x, n_v1*n_v2) = {min(g.n_x, g.n_v)}")

    @property
    def rank(self) -> int:
        return self.S.shape[0]

    def copy(self) -> LowRankState:
        return LowRankState(self.X.copy(), self.S.copy(), self.V.copy(), self.grid)


@dataclass
class CoefficientSet:
    """Projected coefficient tensors of the 1x2v substep equations.

    Velocity integrals (from ``V``)::

        c1[j, l]    = int v1 V_j V_l
        c2[j, l, :] = int V_j grad_v V_l
        c3[j, l]    = int V_j (v2 d_v1 - v1 d_v2) V_l

    Space integrals (from ``X`` and the frozen fields)::

        d1[i, k, :] = (int X_i E1 X_k, int X_i E2 X_k)
        d2[i, k]    = int X_i d_x X_k
        d3[i, k]    = int X_i B3 X_k
    """

    c1: np.ndarray
    c2: np.ndarray
    c3: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray


def qr_orthonormalize(M: np.ndarray, weight: float):
    """Weighted QR of a stack of grid functions, ``M = R @ Q``.

    ``M`` has the ``r`` functions on its leading axis; any trailing shape is
    accepted.  Rows of ``Q`` are orthonormal for ``<a, b> = weight * sum(a*b)``
    and the diagonal of ``R`` is non-negative.

    Returns ``(Q, R, deficient)``.  ``deficient`` is True when a pivot is
    below ``1e-14`` times the largest one.  Householder reflections already
    complete such a row of ``Q`` with a unit vector orthogonal to the
    preceding rows; the coefficients of ``R`` attached to that filler row
    are set to zero, which changes ``R @ Q`` by less than the threshold.
    """
    M = np.asarray(M, dtype=float)
    r = M.shape[0]
    A = M.reshape(r, -1).T * np.sqrt(weight)
    q, rt = np.linalg.qr(A, mode="reduced")
    diag = np.diagonal(rt)
    sign = np.where(diag < 0.0, -1.0, 1.0)
    q = q * sign[None, :]
    rt = rt * sign[:, None]
    pivots = np.abs(np.diagonal(rt))
    weak = pivots <= PIVOT_RTOL * max(pivots.max(), np.finfo(float).tiny)
    if weak.any():
        rt = rt.copy()
        rt[weak, :] = 0.0
    Q = (q.T / np.sqrt(weight)).reshape(M.shape)
    return Q, rt.T, bool(weak.any())


def orthonormality_residual(B: np.ndarray, weight: float) -> float:
    """``max |weight * B B^T - I|`` for a stack of grid functions."""
    r = B.shape[0]
    F = B.reshape(r, -1)
    return float(np.max(np.abs(weight * F @ F.T - np.eye(r))))


def compute_c_coefficients(V: np.ndarray, grid: GridSpec):
    r = V.shape[0]
    w = grid.w_v
    Vf = V.reshape(r, -1)
    dV1 = spectral_deriv_v(grid, V, "v1")
    dV2 = spectral_deriv_v(grid, V, "v2")
    v1 = grid.v1_mesh
    v2 = grid.v2_mesh
    c1 = w * (Vf * v1.reshape(-1)) @ Vf.T
    c2 = np.stack([w * Vf @ dV1.reshape(r, -1).T, w * Vf @ dV2.reshape(r, -1).T], axis=-1)
    rot = (v2 * dV1 - v1 * dV2).reshape(r, -1)
    c3 = w * Vf @ rot.T
    return c1, c2, c3


def compute_d_coefficients(X: np.ndarray, E1, E2, B3, grid: GridSpec):
    h = grid.h_x
    d1 = np.stack([h * (X * E1) @ X.T, h * (X * E2) @ X.T], axis=-1)
    d2 = h * X @ spectral_deriv_x(grid, X, 1).T
    d3 = h * (X * B3) @ X.T
    return d1, d2, d3


def compute_coefficients(X, V, E1, E2, B3, grid: GridSpec) -> CoefficientSet:
    return CoefficientSet(*compute_c_coefficients(V, grid), *compute_d_coefficients(X, E1, E2, B3, grid))


# --- moments in factored form ----------------------------------------------


def velocity_moments(V: np.ndarray, grid: GridSpec):
    """``(int V_j, int v1 V_j, int v2 V_j, int |v|^2 V_j)`` for every basis row."""
    v1 = grid.v1_mesh
    v2 = grid.v2_mesh
    return (
        quad_v(grid, V),
        quad_v(grid, V * v1),
        quad_v(grid, V * v2),
        quad_v(grid, V * (v1**2 + v2**2)),
    )


def charge_density(state: LowRankState) -> np.ndarray:
    m0 = quad_v(state.grid, state.V)
    return (state.S @ m0) @ state.X


def current_density(state: LowRankState):
    g = state.grid
    j1 = (state.S @ quad_v(g, state.V * g.v1_mesh)) @ state.X
    j2 = (state.S @ quad_v(g, state.V * g.v2_mesh)) @ state.X
    return j1, j2


def current_from_L(X: np.ndarray, L: np.ndarray, grid: GridSpec):
    """Current density of ``f = sum_i X_i L_i`` without refactorizing ``L``."""
    j1 = quad_v(grid, L * grid.v1_mesh) @ X
    j2 = quad_v(grid, L * grid.v2_mesh) @ X
    return j1, j2


def kinetic_energy(state: LowRankState) -> float:
    g = state.grid
    vv = quad_v(g, state.V * (g.v1_mesh**2 + g.v2_mesh**2))
    return 0.5 * float(quad_x(g, state.X) @ state.S @ vv)


def mass(state: LowRankState) -> float:
    return float(quad_x(state.grid, state.X) @ state.S @ quad_v(state.grid, state.V))


def inner(a: LowRankState, b: LowRankState) -> float:
    """Discrete ``L^2`` inner product of two factored functions on the same grid."""
    g = a.grid
    gx = g.h_x * a.X @ b.X.T
    gv = g.w_v * a.V.reshape(a.rank, -1) @ b.V.reshape(b.rank, -1).T
    return float(np.sum((gx.T @ a.S @ gv) * b.S))


def l2_distance(a: LowRankState, b: LowRankState) -> float:
    d2 = inner(a, a) - 2.0 * inner(a, b) + inner(b, b)
    return float(np.sqrt(max(d2, 0.0)))


def reconstruct_full(state: LowRankState) -> np.ndarray:
    """Materialize ``f`` on the full ``n_x x n_v1 x n_v2`` tensor (small grids only)."""
    if state.grid.full_size > MAX_FULL_ENTRIES:
        raise ValueError(
            f"refusing to materialize {state.grid.full_size} entries "
            f"(limit {MAX_FULL_ENTRIES} = 2**24); use a smaller grid"
        )
    K = state.S.T @ state.X
    return np.einsum("jx,jab->xab", K, state.V, optimize=True)
