"""Initial data for the Landau-type, two-stream, bump-on-tail and Weibel problems.

Each initial density is a short sum of ``x``/``v`` separable products.  The
factors are sampled on the grid, completed with seeded random vectors up to
the requested rank and orthonormalized; the completion directions get a tiny
diagonal ``pad`` in ``S`` so that ``S`` stays invertible without measurably
changing ``f``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import GridSpec
from .lowrank import LowRankState, charge_density, qr_orthonormalize
from .maxwell import EMField, init_E_from_gauss

KINDS = ("landau", "two_stream", "bump_on_tail", "weibel")

DEFAULT_PARAMS = {
    "landau": {"alpha": 0.01, "k": 0.4},
    "two_stream": {"alpha": 1e-3, "beta": 2e-3, "v0": 0.2},
    "bump_on_tail": {"alpha": 0.9, "beta": 0.2, "gamma": 0.03, "k": 0.3},
    "weibel": {"alpha": 1e-4, "beta": 1e-4, "k": 1.25, "v_th": 0.02, "T_r": 12.0},
}

DEFAULT_SIZES = {
    "landau": (33, 128, 128),
    "two_stream": (33, 64, 64),
    "bump_on_tail": (65, 128, 128),
    "weibel": (65, 192, 192),
}

FINE_SIZES = {"two_stream": (65, 128, 128)}

_INTRINSIC_RANK = {"landau": 1, "two_stream": 1, "bump_on_tail": 2, "weibel": 1}


class ScenarioError(ValueError):
    pass


def intrinsic_rank(kind: str) -> int:
    _check_kind(kind)
    return _INTRINSIC_RANK[kind]


def _check_kind(kind):
    if kind not in KINDS:
        raise ScenarioError(f"unknown scenario {kind!r}; expected one of {', '.join(KINDS)}")


def default_domains(kind: str, params: dict):
    """``(x_domain, v1_domain, v2_domain)`` of a scenario."""
    _check_kind(kind)
    if kind == "landau":
        return (0.0, 2 * np.pi / params["k"]), (-5.0, 5.0), (-5.0, 5.0)
    if kind == "two_stream":
        return (0.0, 2 * np.pi), (-0.4, 0.4), (-0.4, 0.4)
    if kind == "bump_on_tail":
        return (0.0, 20 * np.pi), (-9.0, 9.0), (-9.0, 9.0)
    return (0.0, 2 * np.pi / params["k"]), (-0.3, 0.3), (-0.3, 0.3)


@dataclass
class ScenarioSpec:
    kind: str
    rank: int
    grid: GridSpec | None = None
    params: dict = field(default_factory=dict)
    seed: int = 0
    pad: float = 1e-12

    def __post_init__(self):
        _check_kind(self.kind)
        unknown = set(self.params) - set(DEFAULT_PARAMS[self.kind])
        if unknown:
            raise ScenarioError(
                f"unknown parameter(s) {sorted(unknown)} for {self.kind}; "
                f"known: {sorted(DEFAULT_PARAMS[self.kind])}"
            )
        need = intrinsic_rank(self.kind)
        if self.rank < need:
            raise ScenarioError(f"rank {self.rank} is below the intrinsic rank of {self.kind}: need rank >= {need}")

    @property
    def resolved_params(self) -> dict:
        return {**DEFAULT_PARAMS[self.kind], **self.params}

    @property
    def resolved_grid(self) -> GridSpec:
        if self.grid is not None:
            return self.grid
        return GridSpec(*DEFAULT_SIZES[self.kind], *default_domains(self.kind, self.resolved_params))


def separable_terms(kind: str, grid: GridSpec, params: dict):
    """Initial density as ``(x_factors, v_factors, C)`` with ``f = sum_pq a_p C_pq b_q``."""
    x = grid.x
    v1 = grid.v1_mesh
    v2 = grid.v2_mesh
    p = params
    if kind == "landau":
        a = [1.0 + p["alpha"] * np.cos(p["k"] * x)]
        b = [np.exp(-0.5 * (v1**2 + v2**2)) / (2 * np.pi)]
        C = np.eye(1)
    elif kind == "two_stream":
        beta, v0 = p["beta"], p["v0"]
        a = [np.ones_like(x)]
        b = [
            np.exp(-(v2**2) / beta)
            * (np.exp(-((v1 - v0) ** 2) / beta) + np.exp(-((v1 + v0) ** 2) / beta))
            / (2 * np.pi * beta)
        ]
        C = np.eye(1)
    elif kind == "bump_on_tail":
        pref = 1.0 / (np.sqrt(2.0) * np.pi)
        a = [np.ones_like(x), 1.0 + p["gamma"] * np.cos(p["k"] * x)]
        b = [
            pref * p["alpha"] * np.exp(-0.5 * v1**2) * np.exp(-(v2**2)),
            pref * p["beta"] * np.exp(-2.0 * (v1 - 4.5) ** 2) * np.exp(-(v2**2)),
        ]
        C = np.eye(2)
    elif kind == "weibel":
        vth, Tr = p["v_th"], p["T_r"]
        a = [1.0 + p["alpha"] * np.cos(p["k"] * x)]
        b = [np.exp(-(v1**2 + v2**2 / Tr) / vth**2) / (np.pi * vth**2 * np.sqrt(Tr))]
        C = np.eye(1)
    else:
        _check_kind(kind)
    return np.array(a), np.array(b), C


def initial_fields(kind: str, grid: GridSpec, params: dict, rho: np.ndarray) -> EMField:
    x = grid.x
    zero = np.zeros(grid.n_x)
    if kind == "landau":
        B3 = params["alpha"] / params["k"] * np.sin(params["k"] * x)
        return EMField(init_E_from_gauss(grid, rho), zero.copy(), B3)
    if kind == "two_stream":
        return EMField(zero.copy(), zero.copy(), params["alpha"] * np.sin(x))
    if kind == "bump_on_tail":
        return EMField(init_E_from_gauss(grid, rho), zero.copy(), zero.copy())
    return EMField(init_E_from_gauss(grid, rho), zero.copy(), params["beta"] * np.cos(params["k"] * x))


def build(spec: ScenarioSpec) -> tuple[LowRankState, EMField]:
    """Factorized initial state padded to ``spec.rank`` and the matching fields."""
    grid = spec.resolved_grid
    params = spec.resolved_params
    r = spec.rank
    if r > min(grid.n_x, grid.n_v):
        raise ScenarioError(f"rank {r} exceeds min(n_x, n_v1*n_v2) = {min(grid.n_x, grid.n_v)}")
    a, b, C = separable_terms(spec.kind, grid, params)
    m = C.shape[0]

    rng = np.random.default_rng(spec.seed)
    Xraw = np.concatenate([a, rng.standard_normal((r - m, grid.n_x))])
    Vraw = np.concatenate([b, rng.standard_normal((r - m, grid.n_v1, grid.n_v2))])
    X, Rx, _ = qr_orthonormalize(Xraw, grid.h_x)
    V, Rv, _ = qr_orthonormalize(Vraw, grid.w_v)

    Cfull = np.zeros((r, r))
    Cfull[:m, :m] = C
    S = Rx.T @ Cfull @ Rv
    idx = np.arange(m, r)
    S[idx, idx] = spec.pad
    state = LowRankState(X, S, V, grid)
    fld = initial_fields(spec.kind, grid, params, charge_density(state))
    return state, fld


def analytic_density(kind: str, grid: GridSpec, params: dict | None = None) -> np.ndarray:
    """Initial density sampled on the full tensor grid (for checks on small grids)."""
    params = {**DEFAULT_PARAMS[kind], **(params or {})}
    a, b, C = separable_terms(kind, grid, params)
    return np.einsum("px,pq,qab->xab", a, C, b)
