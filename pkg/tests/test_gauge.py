"""Gauge shifts: invariant observables, shifted geometry, divergence law."""

import math

import numpy as np
import pytest

from rcgeom import (
    catalog_get,
    contorsion_from_potential,
    field_strength,
    gauge_curvature_shift,
    gauge_invariance_suite,
    transform_potential,
    transformed_contorsion,
)
from rcgeom.engine import GeometrySnapshot
from rcgeom.gauge import contorsion_shift_residual, scalar_shift_residual
from rcgeom.harness import charge_ball_model


def test_constant_phi_is_identity():
    m = catalog_get("reissner-nordstrom")
    shifted = transform_potential(m, "3.7")
    x = np.array([0.0, 4.0, 1.2, 0.5])
    assert np.abs(shifted.potential_values(x) - m.potential_values(x)).max() == 0.0
    k0 = contorsion_from_potential(m, x)
    k1 = transformed_contorsion(m, "3.7", x)
    assert np.abs(k1.K_mixed - k0.K_mixed).max() == 0.0


def test_zero_field_means_zero_contorsion_any_phi():
    m = catalog_get("schwarzschild")
    k = transformed_contorsion(m, "0.3*t*r", np.array([0.0, 5.0, 1.0, 0.2]))
    assert np.abs(k.K_mixed).max() == 0.0


def test_time_linear_phi_shifts_potential_not_field():
    m = catalog_get("reissner-nordstrom")
    lam = 0.25
    shifted = transform_potential(m, f"{lam}*t")
    x = np.array([0.0, 4.0, 1.2, 0.5])
    a_new = shifted.potential_values(x)
    assert a_new[0] == pytest.approx(0.3 / 4.0 + lam, abs=1e-14)
    F0 = field_strength(m, x).F_dd.components
    F1 = field_strength(shifted, x).F_dd.components
    assert np.abs(F1 - F0).max() <= 1e-12


def test_bilinear_phi_on_constant_field():
    m = catalog_get("minkowski-constant-e")
    shifted = transform_potential(m, "t*x")
    x = np.array([0.7, 0.4, 0.0, 0.0])
    a_new = shifted.potential_values(x)
    # gains (x, t, 0, 0)
    assert a_new[0] == pytest.approx(-0.4 + 0.4)
    assert a_new[1] == pytest.approx(0.7)
    F0 = field_strength(m, x).F_dd.components
    F1 = field_strength(shifted, x).F_dd.components
    assert np.abs(F1 - F0).max() <= 1e-12


def test_transformed_contorsion_two_routes_agree():
    m = catalog_get("minkowski-constant-e")
    x = np.array([0.3, 0.8, 0.1, 0.0])
    assert contorsion_shift_residual(m, "x", x) <= 1e-13
    k_new = transformed_contorsion(m, "x", x)
    # the shift acts only on the slot fed by grad(phi) = e_1
    s = GeometrySnapshot(m, x)
    delta = k_new.K_mixed - s.K_mix
    expected = -s.C * s.F_mix
    assert np.abs(delta[1] - expected).max() <= 1e-13
    assert np.abs(delta[0]).max() <= 1e-13
    assert np.abs(delta[2:]).max() <= 1e-13


def test_curvature_shift_source_free_is_identity():
    """Without a current the scalar curvature cannot move, whatever phi."""
    for phi in ("0.2*t", "sin(t)*r", "0.05*t*r^2"):
        m = catalog_get("reissner-nordstrom")
        x = np.array([0.0, 5.0, 1.1, 0.4])
        R_new, R_old, div = gauge_curvature_shift(m, phi, x)
        assert abs(div) <= 1e-12
        assert abs(R_new - R_old) <= 1e-12


def test_curvature_shift_constant_phi():
    m = charge_ball_model()
    x = np.array([0.1, 0.2, 0.1, -0.1])
    R_new, R_old, div = gauge_curvature_shift(m, "2.5", x)
    assert abs(div) <= 1e-12
    assert abs(R_new - R_old) <= 1e-12


def test_curvature_shift_with_source_hand_value():
    """phi = t on the charge ball: the shift equals 8 pi C rho_q."""
    m = charge_ball_model(rho_q=0.02)
    x = np.array([0.1, 0.3, -0.2, 0.1])
    R_new, R_old, div = gauge_curvature_shift(m, "t", x)
    expected = 8.0 * math.pi * 0.02
    assert div == pytest.approx(expected, rel=1e-10)
    assert R_new - R_old == pytest.approx(expected, rel=1e-7)
    assert abs(R_new - R_old - div) <= 1e-8


def test_scalar_shift_residual_small_everywhere():
    for model in (catalog_get("reissner-nordstrom"), charge_ball_model()):
        for phi in ("0.2*t", f"0.1*t*{model.chart.names[1]}"):
            for p in model.default_grid[::16]:
                assert scalar_shift_residual(model, phi, p) <= 1e-8


def test_invariance_suite_rn():
    m = catalog_get("reissner-nordstrom")
    rep = gauge_invariance_suite(m, "0.1*t*r", points=m.default_grid[::16])
    assert rep.passed
    assert rep.invariant_deltas["field_strength"] <= 1e-12
    assert rep.invariant_deltas["lorentz_rhs"] <= 1e-12
    assert rep.changed_deltas["contorsion"] > 1e-6
    assert rep.changed_deltas["rc_curvature"] > 1e-6


def test_invariance_suite_constant_field():
    m = catalog_get("minkowski-constant-e")
    rep = gauge_invariance_suite(m, "sin(t)", points=m.default_grid[::3])
    assert rep.passed
    assert rep.changed_deltas["contorsion"] > 1e-6


def test_invariance_suite_trivial_phi():
    m = catalog_get("reissner-nordstrom")
    rep = gauge_invariance_suite(m, "0", points=m.default_grid[::32])
    assert rep.passed
    assert rep.changed_deltas["contorsion"] == 0.0
    assert rep.changed_deltas["rc_curvature"] == 0.0


def test_gauge_orbit_compose_equals_sum():
    m = catalog_get("reissner-nordstrom")
    phi1, phi2 = "0.2*t", "0.05*t*r"
    twice = transform_potential(transform_potential(m, phi1), phi2)
    once = transform_potential(m, f"({phi1}) + ({phi2})")
    for p in (np.array([0.0, 4.0, 1.2, 0.5]), np.array([0.3, 7.0, 2.0, 1.0])):
        s2 = GeometrySnapshot(twice, p)
        s1 = GeometrySnapshot(once, p)
        assert np.abs(s2.K_mix - s1.K_mix).max() <= 1e-12
        assert np.abs(s2.F_dd - s1.F_dd).max() <= 1e-12
        assert abs(s2.scalar_rc - s1.scalar_rc) <= 1e-12


def test_fd_mode_curvature_shift():
    m = charge_ball_model()
    x = np.array([0.1, 0.3, -0.2, 0.1])
    R_new, R_old, div = gauge_curvature_shift(m, "t", x, mode="fd")
    assert abs(R_new - R_old - div) <= 1e-5 * (1 + abs(R_old))
