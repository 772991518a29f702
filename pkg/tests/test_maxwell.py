from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dlrvm.grid import GridSpec, spectral_deriv_x
from dlrvm.maxwell import (
    EMField,
    advance_fields_first_order,
    advance_fields_staggered,
    bootstrap_half_step_B,
    divergence_correction,
    field_energies,
    gauss_residual,
    half_step_E,
    init_E_from_gauss,
    poisson_rhs_from_update,
)
from dlrvm.grid import poisson_solve_periodic

from helpers import band_limited

K = 0.4


def zeros(g):
    return np.zeros(g.n_x)


def test_init_E_landau(landau_grid):
    g = landau_grid
    rho = 1 + 0.01 * np.cos(K * g.x)
    E1 = init_E_from_gauss(g, rho)
    assert np.max(np.abs(E1 + 0.01 / K * np.sin(K * g.x))) < 1e-13
    assert np.max(np.abs(init_E_from_gauss(g, np.full(g.n_x, 1.3)))) < 1e-15


def test_init_E_random_residual(landau_grid, rng):
    g = landau_grid
    rho = 1 + 0.1 * band_limited(g, rng, 10)
    E1 = init_E_from_gauss(g, rho)
    assert gauss_residual(g, E1, rho).l2_residual <= 1e-11
    assert abs(E1.mean()) < 1e-14


def test_gauss_residual_examples(landau_grid):
    g = landau_grid
    rho = 1 + 0.01 * np.cos(K * g.x)
    E1 = init_E_from_gauss(g, rho)
    rep = gauss_residual(g, E1, rho)
    assert rep.l2_residual <= 1e-11
    assert rep.numerical_n0 == pytest.approx(np.mean(rho))
    delta = 1e-3
    pert = E1 + delta * np.sin(K * g.x) / K  # d_x adds delta cos(kx)
    assert abs(gauss_residual(g, pert, rho).l2_residual - delta * np.sqrt(g.L_x / 2)) < 1e-10


def test_gauss_residual_uses_numerical_mean(landau_grid):
    g = landau_grid
    rho = 1.0 + 1e-6 + 0.01 * np.cos(K * g.x)
    E1 = init_E_from_gauss(g, rho)
    assert gauss_residual(g, E1, rho).l2_residual <= 1e-11


def test_bootstrap_half_step_B(landau_grid):
    g = landau_grid
    B0 = np.sin(K * g.x)
    np.testing.assert_array_equal(bootstrap_half_step_B(g, B0, zeros(g), 0.1), B0)
    E2 = np.cos(K * g.x)
    tau = 0.1
    Bh = bootstrap_half_step_B(g, B0, E2, tau)
    assert np.max(np.abs(Bh - (B0 + tau / 2 * K * np.sin(K * g.x)))) < 1e-13
    d1 = np.linalg.norm(Bh - B0)
    d2 = np.linalg.norm(bootstrap_half_step_B(g, B0, E2, tau / 2) - B0)
    assert d1 / d2 == pytest.approx(2.0, rel=1e-12)


def test_half_step_E(landau_grid, rng):
    g = landau_grid
    E1, E2, B3 = (band_limited(g, rng) for _ in range(3))
    fl = EMField(E1, E2, B3)
    out = half_step_E(g, EMField(E1, E2, zeros(g)), (zeros(g), zeros(g)), 0.1)
    np.testing.assert_array_equal(out.E1, E1)
    np.testing.assert_array_equal(out.E2, E2)
    j1, j2 = band_limited(g, rng), band_limited(g, rng)
    tau = 0.2
    out = half_step_E(g, fl, (j1, j2), tau)
    assert np.max(np.abs(out.E1 - (E1 + tau / 2 * j1))) < 1e-14
    assert np.max(np.abs(out.E2 - (E2 + tau / 2 * (j2 - spectral_deriv_x(g, B3))))) < 1e-13
    half = half_step_E(g, fl, (j1, j2), tau / 2)
    np.testing.assert_allclose(out.E1 - E1, 2 * (half.E1 - E1), rtol=1e-12, atol=1e-15)
    np.testing.assert_array_equal(out.B3, B3)


def test_staggered_zero_fields_unchanged(landau_grid):
    g = landau_grid
    out = advance_fields_staggered(g, EMField(zeros(g), zeros(g), zeros(g)), (zeros(g), zeros(g)), 0.1)
    assert not np.any(out.E1) and not np.any(out.E2) and not np.any(out.B3)


def test_staggered_leapfrog_matches_matrix_oracle(landau_grid):
    g = landau_grid
    tau = 0.05
    E2 = np.cos(K * g.x)
    B3 = np.sin(K * g.x)
    # single mode: e' = e - tau*K*b, b' = b + tau*K*e' for (E2, B3) = (e cos, b sin)
    A = np.array([[1.0, -tau * K], [tau * K, 1 - (tau * K) ** 2]])
    state = np.array([1.0, 1.0])
    fl = EMField(zeros(g), E2, B3)
    period = 2 * np.pi / K
    n = int(round(period / tau))
    for _ in range(n):
        fl = advance_fields_staggered(g, fl, (zeros(g), zeros(g)), tau)
        state = A @ state
    assert np.max(np.abs(fl.E2 - state[0] * np.cos(K * g.x))) < 1e-10
    assert np.max(np.abs(fl.B3 - state[1] * np.sin(K * g.x))) < 1e-10


def test_staggered_energy_error_is_second_order(landau_grid):
    """Energy with B3 averaged to integer levels stays within O(tau^2) over a period."""
    g = landau_grid
    errs = []
    for tau in (0.1, 0.05):
        fl = EMField(zeros(g), np.cos(K * g.x), np.sin(K * g.x))
        e0 = None
        worst = 0.0
        for _ in range(int(round(2 * np.pi / K / tau))):
            B_prev = fl.B3
            fl = advance_fields_staggered(g, fl, (zeros(g), zeros(g)), tau)
            e = sum(field_energies(g, fl, B3=0.5 * (B_prev + fl.B3)))
            e0 = e if e0 is None else e0
            worst = max(worst, abs(e - e0))
        errs.append(worst / e0)
    assert errs[0] < (K * 0.1) ** 2
    assert 3.2 < errs[0] / errs[1] < 4.8


def test_damping_decays_modes(landau_grid):
    g = landau_grid
    eps, tau = 0.5, 0.1
    fl = EMField(np.cos(K * g.x), np.cos(2 * K * g.x), zeros(g), eps)
    out = advance_fields_staggered(g, fl, (zeros(g), zeros(g)), tau)
    assert np.max(np.abs(out.E1 - np.cos(K * g.x) / (1 + tau * eps * K**2))) < 1e-13
    prev = None
    fl = EMField(zeros(g), np.cos(K * g.x), np.sin(K * g.x), eps)
    for _ in range(50):
        fl = advance_fields_staggered(g, fl, (zeros(g), zeros(g)), tau)
        e = sum(field_energies(g, fl))
        if prev is not None:
            assert e < prev
        prev = e


def test_first_order_update(landau_grid, rng):
    g = landau_grid
    fl = EMField(band_limited(g, rng), band_limited(g, rng), band_limited(g, rng))
    j = (band_limited(g, rng), band_limited(g, rng))
    tau = 0.1
    out = advance_fields_first_order(g, fl, j, tau)
    E1 = fl.E1 + tau * j[0]
    E2 = fl.E2 + tau * (j[1] - spectral_deriv_x(g, fl.B3))
    B3 = fl.B3 - tau * spectral_deriv_x(g, E2)
    assert np.max(np.abs(out.E1 - E1)) < 1e-13
    assert np.max(np.abs(out.E2 - E2)) < 1e-12
    assert np.max(np.abs(out.B3 - B3)) < 1e-12
    zero = advance_fields_first_order(g, EMField(zeros(g), zeros(g), zeros(g)), (zeros(g), zeros(g)), tau)
    assert not np.any(zero.E2)


def test_first_order_error_is_first_order(landau_grid):
    """Against the exact rotation of a single (E2, B3) mode over one unit of time."""
    g = landau_grid
    e0, b0, t = 1.0, 0.5, 1.0
    exact_e = e0 * np.cos(K * t) - b0 * np.sin(K * t)
    exact_b = b0 * np.cos(K * t) + e0 * np.sin(K * t)
    errs = []
    for tau in (0.02, 0.01):
        fl = EMField(zeros(g), e0 * np.cos(K * g.x), b0 * np.sin(K * g.x))
        for _ in range(int(round(t / tau))):
            fl = advance_fields_first_order(g, fl, (zeros(g), zeros(g)), tau)
        errs.append(
            max(
                np.max(np.abs(fl.E2 - exact_e * np.cos(K * g.x))),
                np.max(np.abs(fl.B3 - exact_b * np.sin(K * g.x))),
            )
        )
    assert 1.6 < errs[0] / errs[1] < 2.4


def test_divergence_correction_consistent_input_is_fixed_point(landau_grid, rng):
    g = landau_grid
    rho = 1 + 0.05 * band_limited(g, rng)
    E1 = init_E_from_gauss(g, rho) + 0.3
    out = divergence_correction(g, E1, rho, 0.1)
    assert np.max(np.abs(out - E1)) <= 1e-11


def test_divergence_correction_removes_single_mode(landau_grid, rng):
    g = landau_grid
    rho = 1 + 0.05 * band_limited(g, rng)
    E1 = init_E_from_gauss(g, rho)
    delta = 1e-3
    out = divergence_correction(g, E1 + delta * np.sin(K * g.x), rho, 0.1)
    assert np.max(np.abs(out - E1)) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1e-3, 1.0))
def test_divergence_correction_enforces_gauss(seed, tau):
    g = GridSpec(33, 4, 4, (0.0, 2 * np.pi / K), (-1, 1), (-1, 1))
    rng = np.random.default_rng(seed)
    rho = 1 + 0.1 * band_limited(g, rng, 12)
    E1_bar = band_limited(g, rng, 12)
    out = divergence_correction(g, E1_bar, rho, tau)
    assert gauss_residual(g, out, rho).l2_residual <= 1e-11
    assert abs(out.mean() - E1_bar.mean()) < 1e-13


def test_residual_form_equals_update_form_without_damping(landau_grid, rng):
    g = landau_grid
    tau = 0.1
    E_old, j1, rho = band_limited(g, rng), band_limited(g, rng), 1 + 0.1 * band_limited(g, rng)
    E_bar = E_old + tau * j1
    n0 = rho.mean()
    residual_form = (n0 - rho - spectral_deriv_x(g, E_bar)) / tau
    update_form = poisson_rhs_from_update(g, E_old, rho, j1, tau)
    assert np.max(np.abs(residual_form - update_form)) < 1e-11
    phi = poisson_solve_periodic(g, update_form)
    assert np.max(np.abs(divergence_correction(g, E_bar, rho, tau) - (E_bar - tau * spectral_deriv_x(g, phi)))) < 1e-12


def test_field_energies(landau_grid):
    g = landau_grid
    a = 0.01
    fl = EMField(-a / K * np.sin(K * g.x), zeros(g), a / K * np.sin(K * g.x))
    ee, em = field_energies(g, fl)
    ref = np.pi * a**2 / (2 * K**3)
    assert abs(ee - ref) < 1e-12 and abs(em - ref) < 1e-12
    assert field_energies(g, fl, B3=zeros(g))[1] == 0.0
