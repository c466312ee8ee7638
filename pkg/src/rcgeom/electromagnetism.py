"""Field strength, Maxwell structure, current, stress-energy, and the
potential-wedge-field 3-form."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import GeometrySnapshot
from .errors import ConsistencyError
from .tensor import DOWN, UP, Tensor, antisymmetrize_3, outer

_ANSATZ_TOL = 1e-6


@dataclass(frozen=True)
class EMField:
    F_dd: Tensor
    F_uu: Tensor
    F_mixed: Tensor  # F_n^{.l}, slots (down, up)
    invariant_F2: float


@dataclass(frozen=True)
class CurrentDensity:
    J_up: Tensor
    J_down: Tensor


@dataclass(frozen=True)
class StressEnergyEM:
    T_dd: Tensor


def field_strength(model, x, mode="dual"):
    snap = GeometrySnapshot(model, x, mode)
    return EMField(
        F_dd=Tensor.antisymmetric2(snap.F_dd),
        F_uu=Tensor((UP, UP), snap.F_uu),
        F_mixed=Tensor((DOWN, UP), snap.F_mix),
        invariant_F2=snap.F2,
    )


def homogeneous_maxwell_residual(model, x, mode="dual"):
    """max over index triples of the cyclic gradient sum of F."""
    return GeometrySnapshot(model, x, mode).homogeneous_residual()


def cyclic_gradient_residual(dF_dd):
    """Same cyclic sum applied to a raw gradient array d_l F_mn (slot order
    derivative, first, second); lets the harness feed deliberately corrupted
    field data that did not come from a potential."""
    d = np.asarray(dF_dd, dtype=float)
    cyc = d + d.transpose(1, 2, 0) + d.transpose(2, 0, 1)
    return float(np.abs(cyc).max())


def current(model, x, mode="dual"):
    """Conserved current from the divergence of F.

    The divergence is also evaluated with the full (torsionful) connection;
    the two must agree because the contorsion contractions cancel for the
    potential-built contorsion.  A mismatch means the ansatz was violated.
    """
    snap = GeometrySnapshot(model, x, mode)
    mismatch = float(np.abs(snap.rc_div_F - snap.lc_div_F_det).max())
    scale = 1.0 + float(np.abs(snap.lc_div_F_det).max())
    if mismatch > _ANSATZ_TOL * scale:
        raise ConsistencyError(
            f"torsionful and metric divergences of F disagree by {mismatch:.3e} "
            f"at {tuple(snap.x)}"
        )
    return CurrentDensity(
        J_up=Tensor((UP,), snap.J_up),
        J_down=Tensor((DOWN,), snap.J_down),
    )


def current_conservation_residual(model, x, mode="dual"):
    return GeometrySnapshot(model, x, mode).current_conservation_residual()


def stress_energy(model, x, mode="dual"):
    snap = GeometrySnapshot(model, x, mode)
    return StressEnergyEM(T_dd=Tensor((DOWN, DOWN), snap.T_em_dd))


def stress_conservation_residual(model, x, mode="dual"):
    """max_n |div T^{mn} - F^{mn} J_m / c| with both sides independent."""
    snap = GeometrySnapshot(model, x, mode)
    lhs = snap.div_T_em("rc")
    rhs = np.einsum("mn,m->n", snap.F_uu, snap.J_down) / snap.c_light
    return float(np.abs(lhs - rhs).max())


def chern_simons_density(model, x, mode="dual"):
    """(1/3!) times the cyclic antisymmetrization of A (x) F."""
    snap = GeometrySnapshot(model, x, mode)
    a = Tensor.vector(snap.A, DOWN)
    f = Tensor.antisymmetric2(snap.F_dd)
    cyc = antisymmetrize_3(outer(a, f))
    return Tensor((DOWN, DOWN, DOWN), cyc.components / 6.0)
