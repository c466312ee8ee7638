"""Contorsion, torsion, the full connection, and its curvature split."""

import numpy as np
import pytest

from rcgeom import (
    MetricAtPoint,
    catalog_get,
    christoffel,
    contorsion_from_potential,
    full_connection,
    lc_curvature,
    rc_curvature,
    scalar_curvature_split,
    torsion_from_contorsion,
)
from rcgeom.engine import GeometrySnapshot
from rcgeom.riemann_cartan import Contorsion, contorsion_from_torsion

ALL_ENTRIES = (
    "minkowski",
    "minkowski-constant-e",
    "schwarzschild",
    "reissner-nordstrom",
    "em-plane-wave",
)


def _random_point(model, rng):
    box = model.sample_box()
    names = model.chart.names
    while True:
        p = np.array([rng.uniform(*box[n]) for n in names])
        if model.in_domain(p):
            return p


def test_uncharged_model_has_no_contorsion():
    m = catalog_get("schwarzschild")
    k = contorsion_from_potential(m, np.array([0.0, 4.0, 1.2, 0.3]))
    assert np.abs(k.K_mixed).max() == 0.0


def test_constant_field_contorsion_hand_value():
    """At x = 2 with unit coupling: A = (-2,0,0,0), F_1^{.0} = -1, so
    K_{01}^{..0} = -C A_0 F_1^{.0} = -2."""
    m = catalog_get("minkowski-constant-e")
    k = contorsion_from_potential(m, np.array([0.0, 2.0, 0.0, 0.0]))
    assert k.K_mixed[0, 1, 0] == pytest.approx(-2.0, abs=1e-14)
    assert k.K_all_down[0, 1, 0] == pytest.approx(-2.0, abs=1e-14)
    assert k.K_mixed[1, 0, 0] == 0.0


def test_contorsion_antisymmetry_on_random_data():
    rng = np.random.default_rng(17)
    for _ in range(100):
        a = rng.standard_normal(4)
        f = rng.standard_normal((4, 4))
        f = f - f.T
        k_down = -np.einsum("m,nl->mnl", a, f)
        assert np.abs(k_down + k_down.transpose(0, 2, 1)).max() <= 1e-12


def test_torsion_hand_value():
    m = catalog_get("minkowski-constant-e")
    x = np.array([0.0, 2.0, 0.0, 0.0])
    k = contorsion_from_potential(m, x)
    t = torsion_from_contorsion(k, m.metric_at(x))
    assert t.T_mixed[0, 1, 0] == pytest.approx(-2.0, abs=1e-14)
    assert t.T_mixed[1, 0, 0] == pytest.approx(2.0, abs=1e-14)


def test_torsion_contorsion_roundtrip_random():
    rng = np.random.default_rng(23)
    eta = np.diag([1.0, -1.0, -1.0, -1.0])
    for _ in range(50):
        pert = rng.standard_normal((4, 4))
        g = eta + 0.05 * (pert + pert.T)
        try:
            m = MetricAtPoint.from_components(g)
        except Exception:
            continue
        a = rng.standard_normal(4)
        f = rng.standard_normal((4, 4))
        f = f - f.T
        f_mix = np.einsum("la,na->nl", m.inverse, f)
        k = Contorsion(
            K_mixed=-np.einsum("m,nl->mnl", a, f_mix),
            K_all_down=-np.einsum("m,nl->mnl", a, f),
        )
        t = torsion_from_contorsion(k, m)
        rebuilt = contorsion_from_torsion(t, m)
        assert np.abs(rebuilt.K_mixed - k.K_mixed).max() <= 1e-12


def test_full_connection_reduces_without_charge():
    m = catalog_get("schwarzschild")
    x = np.array([0.0, 5.0, 1.0, 0.2])
    lc = christoffel(m, x)
    k = contorsion_from_potential(m, x)
    full = full_connection(lc, k)
    assert full.torsionless
    assert np.abs(full.gamma - lc.gamma).max() == 0.0


def test_full_connection_antisymmetric_part_is_torsion():
    m = catalog_get("reissner-nordstrom")
    x = np.array([0.0, 4.0, 1.2, 0.5])
    lc = christoffel(m, x)
    k = contorsion_from_potential(m, x)
    full = full_connection(lc, k)
    assert not full.torsionless
    t = torsion_from_contorsion(k, m.metric_at(x))
    anti = full.gamma - full.gamma.transpose(1, 0, 2)
    assert np.abs(anti - t.T_mixed).max() <= 1e-12


def test_full_connection_metric_compatibility():
    for name in ALL_ENTRIES:
        m = catalog_get(name)
        for p in m.default_grid[:: max(1, len(m.default_grid) // 5)]:
            s = GeometrySnapshot(m, p)
            assert s.metric_compatibility_residual("rc") <= 1e-10


def test_rc_curvature_equals_lc_without_charge():
    m = catalog_get("schwarzschild")
    x = np.array([0.0, 4.5, 0.8, 0.1])
    rc = rc_curvature(m, x)
    lc = lc_curvature(m, x)
    assert np.abs(rc.curvature.riemann.components - lc.riemann.components).max() == 0.0
    assert rc.decomposition_residual <= 1e-12
    assert rc.quadratic_residual == 0.0


def test_rc_curvature_constant_field_hand_values():
    """In the flat constant-field model the curvature is the coordinate
    derivative of the contorsion: R_{10l}^{.c} = C E F_l^{.c}."""
    m = catalog_get("minkowski-constant-e")
    x = np.array([0.0, 2.0, 0.0, 0.0])
    s = GeometrySnapshot(m, x)
    R = rc_curvature(m, x).curvature.riemann.components
    assert np.abs(R[1, 0] - s.F_mix).max() <= 1e-14
    assert np.abs(R[0, 1] + s.F_mix).max() <= 1e-14
    mask = np.ones((4, 4), dtype=bool)
    mask[1, 0] = mask[0, 1] = False
    assert np.abs(R[mask]).max() <= 1e-14
    # explicit entries: F_0^{.1} = F_1^{.0} = -E = -1
    assert R[1, 0, 0, 1] == pytest.approx(-1.0)
    assert R[1, 0, 1, 0] == pytest.approx(-1.0)
    assert R[0, 1, 0, 1] == pytest.approx(1.0)


def test_quadratic_terms_cancel_at_random_points():
    rng = np.random.default_rng(31)
    for name in ALL_ENTRIES:
        m = catalog_get(name)
        for _ in range(20):
            s = GeometrySnapshot(m, _random_point(m, rng))
            assert s.quadratic_pair_residual() <= 1e-12


def test_decomposition_across_catalog():
    for name in ALL_ENTRIES:
        m = catalog_get(name)
        for p in m.default_grid[:: max(1, len(m.default_grid) // 6)]:
            assert rc_curvature(m, p).decomposition_residual <= 1e-8


def test_scalar_split_uncharged():
    m = catalog_get("schwarzschild")
    R, R_bar, em, coupling = scalar_curvature_split(m, np.array([0.0, 4.0, 1.3, 0.2]))
    assert abs(R) <= 1e-10
    assert abs(R_bar) <= 1e-10
    assert em == 0.0
    assert coupling == 0.0


def test_scalar_split_rn_hand_value():
    """R = C F.F = -2 q^2 / r^4; at r = 4 with q = 0.3 this is -7.03125e-4."""
    m = catalog_get("reissner-nordstrom")
    R, R_bar, em, coupling = scalar_curvature_split(m, np.array([0.0, 4.0, 1.3, 0.2]))
    assert R == pytest.approx(-7.03125e-4, abs=1e-8)
    assert em == pytest.approx(-7.03125e-4, abs=1e-12)
    assert abs(R_bar) <= 1e-10
    assert abs(coupling) <= 1e-12


def test_scalar_split_plane_wave_vanishes():
    m = catalog_get("em-plane-wave")
    for p in m.default_grid[::7]:
        R, R_bar, em, coupling = scalar_curvature_split(m, p)
        assert abs(R) <= 1e-12
        assert abs(em) <= 1e-12


def test_contorsion_trace_matches_pinned_definition():
    """The closed-form trace vector equals g^{na} g^{ml} K_{anl}."""
    m = catalog_get("reissner-nordstrom")
    rng = np.random.default_rng(5)
    for _ in range(10):
        s = GeometrySnapshot(m, _random_point(m, rng))
        pinned = np.einsum("na,ml,anl->m", s.ginv, s.ginv, s.K_down)
        assert np.abs(pinned - s.contorsion_trace_vector).max() <= 1e-14


def test_scalar_split_agrees_with_direct_trace():
    for name in ALL_ENTRIES:
        m = catalog_get(name)
        p = m.default_grid[len(m.default_grid) // 2]
        s = GeometrySnapshot(m, p)
        R, R_bar, em, coupling, R_traced = s.scalar_split()
        assert abs(R - (R_bar + em + coupling)) <= 1e-8
        assert abs(R_traced - (R_bar + em + coupling)) <= 1e-8
