from __future__ import annotations

import numpy as np
import pytest

from dlrvm.grid import GridSpec
from dlrvm.integrator import strang_step
from dlrvm.lowrank import reconstruct_full
from dlrvm.maxwell import EMField, bootstrap_half_step_B
from dlrvm.oracle import FullTensorState, full_mass, moments_full, oracle_strang_step
from dlrvm.scenarios import DEFAULT_PARAMS, KINDS, ScenarioSpec, build, default_domains


def test_size_guard():
    g = GridSpec(65, 1024, 1024, (0, 1), (-1, 1), (-1, 1))
    with pytest.raises(ValueError, match="2\\*\\*24"):
        FullTensorState(np.zeros((1, 1, 1)), g)


def test_shape_check(small_grid):
    with pytest.raises(ValueError, match="shape"):
        FullTensorState(np.zeros((3, 3, 3)), small_grid)


def test_homogeneous_maxwellian_fixed_point():
    g = GridSpec(17, 16, 16, (0.0, 2 * np.pi / 0.4), (-8.0, 8.0), (-8.0, 8.0))
    f = np.broadcast_to(np.exp(-(g.v1_mesh**2 + g.v2_mesh**2) / 2) / (2 * np.pi), (17, 16, 16)).copy()
    z = np.zeros(17)
    st, fl = oracle_strang_step(FullTensorState(f, g), EMField(z, z, z), 0.1)
    assert np.max(np.abs(st.f - f)) < 1e-12
    assert max(np.max(np.abs(a)) for a in (fl.E1, fl.E2, fl.B3)) < 1e-12


def test_moments_constant_tensor(small_grid):
    g = small_grid
    rho, j1, j2 = moments_full(np.ones((g.n_x, g.n_v1, g.n_v2)), g)
    assert np.allclose(rho, 12.0 * 12.0)
    # odd moments of a constant pick up only the unpaired edge point -a
    assert np.allclose(j1, g.w_v * g.n_v2 * g.v1.sum())


def test_full_rank_lowrank_tracks_oracle(small_grid):
    g = small_grid
    st, fl = build(ScenarioSpec("landau", g.n_x, grid=g, params={"alpha": 0.1}))
    tau = 0.05
    fl = EMField(fl.E1, fl.E2, bootstrap_half_step_B(g, fl.B3, fl.E2, tau))
    o, ofl = FullTensorState.from_lowrank(st), fl
    for _ in range(10):
        st, fl = strang_step(st, fl, tau)
        o, ofl = oracle_strang_step(o, ofl, tau)
    f = reconstruct_full(st)
    assert np.linalg.norm(f - o.f) / np.linalg.norm(o.f) <= 1e-6


@pytest.mark.parametrize("kind", KINDS)
def test_oracle_mass_conservation(kind):
    xd, v1d, v2d = default_domains(kind, DEFAULT_PARAMS[kind])
    g = GridSpec(17, 16, 16, xd, v1d, v2d)
    st, fl = build(ScenarioSpec(kind, 2, grid=g))
    o = FullTensorState.from_lowrank(st)
    tau = 0.05
    fl = EMField(fl.E1, fl.E2, bootstrap_half_step_B(g, fl.B3, fl.E2, tau))
    m0 = full_mass(o.f, g)
    for _ in range(100):
        o, fl = oracle_strang_step(o, fl, tau)
    assert abs(full_mass(o.f, g) - m0) <= 1e-11


def test_oracle_is_deterministic(small_grid):
    g = small_grid
    st, fl = build(ScenarioSpec("landau", 3, grid=g, params={"alpha": 0.1}))
    a = oracle_strang_step(FullTensorState.from_lowrank(st), fl, 0.05)
    b = oracle_strang_step(FullTensorState.from_lowrank(st), fl, 0.05)
    np.testing.assert_array_equal(a[0].f, b[0].f)
    np.testing.assert_array_equal(a[1].E1, b[1].E1)
