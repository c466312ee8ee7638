"""The torsionful structure built from the potential.

Contorsion K_{mn}^{.l} = -(G/c^4) A_m F_n^{.l}, the torsion it generates,
the full connection, the curvature of the full connection together with its
split into the metric curvature plus contorsion-derivative terms, and the
corresponding split of the scalar curvature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import GeometrySnapshot, _riemann_from_connection
from .errors import ConsistencyError, TensorError
from .levi_civita import ConnectionCoefficients, _curvature_from

_ANTISYMMETRY_TOL = 1e-12
_ROUNDTRIP_TOL = 1e-8
_CONVENTION_TOL = 1e-6


def _frozen(arr, shape):
    arr = np.asarray(arr, dtype=float)
    if arr.shape != shape:
        raise TensorError(f"expected shape {shape}, got {arr.shape}")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Contorsion:
    """Contorsion with slots (down, down, up) and its all-down layout."""

    K_mixed: np.ndarray
    K_all_down: np.ndarray

    def __post_init__(self):
        km = _frozen(self.K_mixed, (4, 4, 4))
        kd = _frozen(self.K_all_down, (4, 4, 4))
        scale = max(1.0, float(np.abs(kd).max()))
        if np.abs(kd + kd.transpose(0, 2, 1)).max() > _ANTISYMMETRY_TOL * scale:
            raise ConsistencyError(
                "contorsion is not antisymmetric in its last two (down) slots"
            )
        object.__setattr__(self, "K_mixed", km)
        object.__setattr__(self, "K_all_down", kd)


@dataclass(frozen=True)
class Torsion:
    """Torsion with slots (down, down, up), antisymmetric in the first pair."""

    T_mixed: np.ndarray

    def __post_init__(self):
        tm = _frozen(self.T_mixed, (4, 4, 4))
        scale = max(1.0, float(np.abs(tm).max()))
        if np.abs(tm + tm.transpose(1, 0, 2)).max() > _ANTISYMMETRY_TOL * scale:
            raise ConsistencyError("torsion is not antisymmetric in its first pair")
        object.__setattr__(self, "T_mixed", tm)


def contorsion_from_potential(model, x, mode="dual"):
    snap = GeometrySnapshot(model, x, mode)
    return Contorsion(K_mixed=snap.K_mix, K_all_down=snap.K_down)


def contorsion_from_torsion(torsion, m):
    """Rebuild the contorsion from torsion and the metric at a point."""
    T = torsion.T_mixed if isinstance(torsion, Torsion) else np.asarray(torsion)
    gi, g = m.inverse, m.matrix
    # K_{mn}^b = (T_{mn}^b - g^{lb} g_{nr} T_{ml}^r - g^{lb} g_{mr} T_{nl}^r) / 2
    t2 = np.einsum("lb,nr,mlr->mnb", gi, g, T)
    t3 = np.einsum("lb,mr,nlr->mnb", gi, g, T)
    K_mixed = 0.5 * (T - t2 - t3)
    K_down = np.einsum("bl,mnb->mnl", g, K_mixed)
    return Contorsion(K_mixed=K_mixed, K_all_down=K_down)


def torsion_from_contorsion(k, m):
    """Antisymmetrize the contorsion; verifies the rebuild round trip."""
    K = k.K_mixed
    T = K - K.transpose(1, 0, 2)
    rebuilt = contorsion_from_torsion(Torsion(T_mixed=T), m)
    scale = max(1.0, float(np.abs(K).max()))
    err = float(np.abs(rebuilt.K_mixed - K).max())
    if err > _ROUNDTRIP_TOL * scale:
        raise ConsistencyError(
            f"torsion/contorsion round trip failed with residual {err:.3e}"
        )
    return Torsion(T_mixed=T)


def full_connection(lc, k):
    """Sum of the metric connection and the contorsion."""
    if not lc.torsionless:
        raise ConsistencyError("full_connection expects a torsionless base connection")
    gamma = lc.gamma + k.K_mixed
    torsionless = bool(np.abs(k.K_mixed).max() < 1e-15)
    return ConnectionCoefficients(gamma=gamma, torsionless=torsionless)


@dataclass(frozen=True)
class RCCurvatureResult:
    curvature: object  # CurvatureAtPoint of the full connection
    decomposition_residual: float
    quadratic_residual: float


def rc_curvature(model, x, mode="dual"):
    """Curvature of the full connection, computed directly from the
    connection polynomial and cross-checked against the split into metric
    curvature plus contorsion-derivative terms."""
    snap = GeometrySnapshot(model, x, mode)
    res = snap.decomposition_residual()
    scale = 1.0 + float(np.abs(snap.riemann_rc).max())
    if res > _CONVENTION_TOL * scale:
        raise ConsistencyError(
            f"curvature decomposition residual {res:.3e} at {tuple(snap.x)}; "
            "index conventions are inconsistent"
        )
    curved = _curvature_from(snap, snap.riemann_rc, snap.ricci_rc, snap.scalar_rc)
    return RCCurvatureResult(
        curvature=curved,
        decomposition_residual=res,
        quadratic_residual=snap.quadratic_pair_residual(),
    )


def riemann_direct(gamma, dgamma):
    """Curvature polynomial of an arbitrary connection (shared helper)."""
    return _riemann_from_connection(gamma, dgamma)


def scalar_curvature_split(model, x, mode="dual"):
    """(R, R_metric, em term, coupling term) with R the direct trace.

    The invariant R = R_metric + em + coupling is enforced, as is agreement
    with the divergence-of-contorsion-trace route.
    """
    snap = GeometrySnapshot(model, x, mode)
    R, R_bar, em, coupling, R_traced = snap.scalar_split()
    scale = 1.0 + abs(R)
    err = max(abs(R - (R_bar + em + coupling)), abs(R_traced - (R_bar + em + coupling)))
    if err > _CONVENTION_TOL * scale:
        raise ConsistencyError(
            f"scalar curvature split residual {err:.3e} at {tuple(snap.x)}"
        )
    return R, R_bar, em, coupling
