"""Gauge transformations of the potential and their geometric footprint.

Shifting the potential by an exact gradient leaves the field strength,
current, stress-energy, and worldline dynamics untouched while shifting
the contorsion and the full-connection curvature in a controlled way; the
scalar-curvature change is a pure divergence.  Both halves are verified
numerically here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .catalog import SpacetimeModel
from .dynamics import _rhs
from .engine import GeometrySnapshot
from .errors import ConsistencyError
from .fields import ExprField, ShiftedPotentialField
from .riemann_cartan import Contorsion

# The definitional shift of the contorsion under A -> A + d(phi) is
# -(G/c^4) (d_m phi) F_n^{.l}; the opposite (positive) sign sometimes quoted
# for it is flagged in reports rather than silently adopted.
PRINTED_SHIFT_SIGN_NOTE = (
    "contorsion shift computed definitionally as -(G/c^4) grad(phi) (x) F; "
    "a +(G/c^4) sign convention for the same shift is reported as a "
    "discrepancy, not an error"
)


def as_phi_field(model, phi):
    if isinstance(phi, str):
        env = dict(model.params)
        env["G"] = model.constants.G
        env["c"] = model.constants.c
        return ExprField(phi, model.chart, env, name=f"phi:{phi}")
    return phi


def transform_potential(model, phi):
    """New model with the potential shifted by the gradient of phi."""
    phi = as_phi_field(model, phi)
    shifted = tuple(
        ShiftedPotentialField(model.A_fields[n], phi, n, name=f"A'[{n}]")
        for n in range(4)
    )
    return SpacetimeModel(
        name=f"{model.name}+gauge",
        chart=model.chart,
        g_fields=model.g_fields,
        A_fields=shifted,
        constants=model.constants,
        params=model.params,
        grid_axes=model.grid_axes,
        domain=model.domain,
        meta=model.meta,
    )


def _shift_routes(model, phi, x, mode):
    """(recomputed contorsion, closed-form-shifted contorsion, mismatch)."""
    snap = GeometrySnapshot(model, x, mode)
    new_snap = GeometrySnapshot(transform_potential(model, phi), x, mode)
    dphi = phi.jet(x, 1).grad
    route_shift = snap.K_mix - snap.C * np.einsum("m,nl->mnl", dphi, snap.F_mix)
    scale = 1.0 + float(np.abs(new_snap.K_mix).max())
    err = float(np.abs(new_snap.K_mix - route_shift).max()) / scale
    return new_snap, route_shift, err


def contorsion_shift_residual(model, phi, x, mode="dual"):
    """Mismatch between the recomputed and the closed-form-shifted contorsion."""
    phi = as_phi_field(model, phi)
    return _shift_routes(model, phi, x, mode)[2]


def transformed_contorsion(model, phi, x, mode="dual"):
    """Contorsion of the shifted potential, computed two ways.

    Route one rebuilds it from the transformed model; route two adds the
    closed-form shift to the original contorsion.  Both are definitional
    and must agree to roundoff (stencil accuracy in fd mode).
    """
    phi = as_phi_field(model, phi)
    new_snap, _shifted, err = _shift_routes(model, phi, x, mode)
    tol = 1e-12 if mode == "dual" else 1e-8
    if err > tol:
        raise ConsistencyError(
            f"transformed-contorsion routes disagree by {err:.3e} at {tuple(np.asarray(x, float))}"
        )
    return Contorsion(K_mixed=new_snap.K_mix, K_all_down=new_snap.K_down)


def _shift_pieces(model, phi, x, mode):
    phi = as_phi_field(model, phi)
    snap = GeometrySnapshot(model, x, mode)
    new_snap = GeometrySnapshot(transform_potential(model, phi), x, mode)
    pj = phi.jet(x, 1)
    s, ds = snap.sqrt_g, snap.dsqrt_g
    J, dJ = snap.J_up, snap.dJ_up
    div = float(
        np.einsum("m,m->", ds, pj.value * J)
        + s * np.einsum("m,m->", pj.grad, J)
        + s * pj.value * np.einsum("mm->", dJ)
    )
    coeff = 8.0 * np.pi * snap.C / (snap.c_light * s)
    return new_snap.scalar_rc, snap.scalar_rc, coeff * div


def scalar_shift_residual(model, phi, x, mode="dual"):
    """|R_new - R_old - divergence term| normalized by 1 + |R_old|."""
    R_new, R_old, div_term = _shift_pieces(model, phi, x, mode)
    return abs(R_new - R_old - div_term) / (1.0 + abs(R_old))


def gauge_curvature_shift(model, phi, x, mode="dual"):
    """(R_new, R_old, divergence term) for the scalar-curvature change.

    The divergence term is 8 pi G / (c^5 sqrt(-g)) d_m(sqrt(-g) phi J^m)
    with the current differentiated exactly (dual mode) or by stencils
    (fd mode); the contract R_new - R_old = divergence term is enforced.
    """
    R_new, R_old, divergence_term = _shift_pieces(model, phi, x, mode)
    tol = 1e-8 if mode == "dual" else 1e-5
    if abs(R_new - R_old - divergence_term) > tol * (1.0 + abs(R_old)):
        raise ConsistencyError(
            f"scalar-curvature shift mismatch {R_new - R_old - divergence_term:.3e} "
            f"at {tuple(np.asarray(x, float))}"
        )
    return R_new, R_old, divergence_term


_INVARIANT_TOLS_DUAL = {
    "field_strength": 1e-12,
    "current": 1e-10,
    "stress_energy": 1e-10,
    "einstein_residual": 1e-10,
    "lorentz_rhs": 1e-12,
}
_INVARIANT_TOLS_FD = {
    "field_strength": 1e-8,
    "current": 1e-6,
    "stress_energy": 1e-8,
    "einstein_residual": 1e-8,
    "lorentz_rhs": 1e-8,
}


@dataclass
class GaugeInvarianceReport:
    phi_name: str
    invariant_deltas: dict
    changed_deltas: dict
    tolerances: dict
    passed: bool
    notes: list = field(default_factory=list)


def _test_velocity(snap):
    w = np.array([1.0, 0.05, 0.03, 0.02])
    for _ in range(8):
        n2 = float(w @ snap.g @ w)
        if n2 > 1e-6:
            return w / np.sqrt(n2)
        w[1:] *= 0.25
    raise ConsistencyError(f"could not build a timelike test velocity at {tuple(snap.x)}")


def gauge_invariance_suite(model, phi, points=None, charge_ratio=0.7, mode="dual"):
    """Check the gauge-invariant observables and report what shifted.

    The field strength, current, stress-energy, Einstein-equation residual,
    and force-law right-hand side must not move; the contorsion, torsion,
    and full-connection curvature are expected to move and their maximum
    deltas are reported as evidence.
    """
    phi = as_phi_field(model, phi)
    new_model = transform_potential(model, phi)
    if points is None:
        points = model.default_grid
    tols = _INVARIANT_TOLS_DUAL if mode == "dual" else _INVARIANT_TOLS_FD

    eight_pi_c = 8.0 * np.pi * model.constants.coupling
    inv = {k: 0.0 for k in tols}
    changed = {"contorsion": 0.0, "torsion": 0.0, "rc_curvature": 0.0, "rc_scalar": 0.0}

    for p in points:
        old = GeometrySnapshot(model, p, mode)
        new = GeometrySnapshot(new_model, p, mode)

        inv["field_strength"] = max(
            inv["field_strength"], float(np.abs(new.F_dd - old.F_dd).max())
        )
        inv["current"] = max(inv["current"], float(np.abs(new.J_up - old.J_up).max()))
        inv["stress_energy"] = max(
            inv["stress_energy"], float(np.abs(new.T_em_dd - old.T_em_dd).max())
        )
        res_old = old.einstein_lc_dd - eight_pi_c * old.T_em_dd
        res_new = new.einstein_lc_dd - eight_pi_c * new.T_em_dd
        inv["einstein_residual"] = max(
            inv["einstein_residual"], float(np.abs(res_new - res_old).max())
        )
        V = _test_velocity(old)
        _, dv_old = _rhs(model, p, V, charge_ratio, mode)
        _, dv_new = _rhs(new_model, p, V, charge_ratio, mode)
        inv["lorentz_rhs"] = max(inv["lorentz_rhs"], float(np.abs(dv_new - dv_old).max()))

        changed["contorsion"] = max(
            changed["contorsion"], float(np.abs(new.K_mix - old.K_mix).max())
        )
        changed["torsion"] = max(
            changed["torsion"], float(np.abs(new.torsion_mix - old.torsion_mix).max())
        )
        changed["rc_curvature"] = max(
            changed["rc_curvature"], float(np.abs(new.riemann_rc - old.riemann_rc).max())
        )
        changed["rc_scalar"] = max(
            changed["rc_scalar"], abs(new.scalar_rc - old.scalar_rc)
        )

    passed = all(inv[k] <= tols[k] for k in tols)
    return GaugeInvarianceReport(
        phi_name=getattr(phi, "name", "phi"),
        invariant_deltas=inv,
        changed_deltas=changed,
        tolerances=dict(tols),
        passed=passed,
        notes=[PRINTED_SHIFT_SIGN_NOTE],
    )
