"""Torsion-free metric geometry at a point.

Christoffel symbols, curvature, the two equivalent divergence formulas for
antisymmetric rank-2 fields, and a generic covariant derivative for tensor
fields given by differentiable components.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import GeometrySnapshot
from .errors import TensorError
from .tensor import DOWN, UP, Tensor


@dataclass(frozen=True)
class ConnectionCoefficients:
    """Connection coefficients with slots (lower, lower, upper)."""

    gamma: np.ndarray
    torsionless: bool

    def __post_init__(self):
        arr = np.asarray(self.gamma, dtype=float)
        if arr.shape != (4, 4, 4):
            raise TensorError(f"connection coefficients must be 4x4x4, got {arr.shape}")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "gamma", arr)


@dataclass(frozen=True)
class CurvatureAtPoint:
    riemann: Tensor  # slots (down, down, down, up)
    ricci: Tensor
    scalar: float
    einstein: Tensor


def christoffel(model, x, mode="dual"):
    snap = GeometrySnapshot(model, x, mode)
    return ConnectionCoefficients(gamma=snap.gamma_lc, torsionless=True)


def _curvature_from(snap, riemann, ricci, scalar):
    einstein = ricci - 0.5 * snap.g * scalar
    return CurvatureAtPoint(
        riemann=Tensor((DOWN, DOWN, DOWN, UP), riemann),
        ricci=Tensor((DOWN, DOWN), ricci),
        scalar=float(scalar),
        einstein=Tensor((DOWN, DOWN), einstein),
    )


def lc_curvature(model, x, mode="dual"):
    snap = GeometrySnapshot(model, x, mode)
    return _curvature_from(snap, snap.riemann_lc, snap.ricci_lc, snap.scalar_lc)


def lc_divergence_antisym2(model, x, F_field=None, mode="dual"):
    """Divergence of an antisymmetric (up, up) field via the volume-factor
    formula; defaults to the model's own electromagnetic field."""
    snap = GeometrySnapshot(model, x, mode)
    if F_field is None:
        return snap.lc_div_F_det.copy()
    F = np.asarray(F_field.components(x), dtype=float)
    dF = np.asarray(F_field.gradient(x), dtype=float)
    return np.einsum("m,mn->n", snap.dsqrt_g, F) / snap.sqrt_g + np.einsum(
        "mmn->n", dF
    )


def contracted_bianchi_residual(model, x, mode="dual"):
    """max_n |divergence of the Einstein tensor| at a point."""
    return GeometrySnapshot(model, x, mode).bianchi_residual()


# -- tensor fields for the generic covariant derivative -----------------------


class ExprTensorField:
    """Tensor field whose components are differentiable scalar fields."""

    def __init__(self, fields, variance, mode="dual"):
        self.fields = np.asarray(fields, dtype=object)
        self.variance = tuple(variance)
        self.mode = mode
        if self.fields.shape != (4,) * len(self.variance):
            raise TensorError("component grid shape does not match variance")

    def components(self, x):
        out = np.empty(self.fields.shape)
        for idx in np.ndindex(*self.fields.shape):
            out[idx] = self.fields[idx].value(x)
        return out

    def gradient(self, x):
        from .fields import fd_jet

        out = np.empty((4,) + self.fields.shape)
        for idx in np.ndindex(*self.fields.shape):
            f = self.fields[idx]
            jv = f.jet(x, 1) if self.mode == "dual" else fd_jet(f, x, 1)
            out[(slice(None),) + idx] = jv.grad
        return out


class ConstantTensorField:
    def __init__(self, components, variance):
        self.array = np.asarray(components, dtype=float)
        self.variance = tuple(variance)

    def components(self, x):
        return self.array

    def gradient(self, x):
        return np.zeros((4,) + self.array.shape)


class MetricField:
    """The metric itself as a rank-2 Down field."""

    variance = (DOWN, DOWN)

    def __init__(self, model, mode="dual"):
        self.model = model
        self.mode = mode

    def components(self, x):
        return GeometrySnapshot(self.model, x, self.mode).g

    def gradient(self, x):
        return GeometrySnapshot(self.model, x, self.mode).dg


class EinsteinField:
    """Einstein tensor with both indices up, as a differentiable field."""

    variance = (UP, UP)

    def __init__(self, model, mode="dual"):
        self.model = model
        self.mode = mode

    def components(self, x):
        return GeometrySnapshot(self.model, x, self.mode).einstein_lc_uu

    def gradient(self, x):
        return GeometrySnapshot(self.model, x, self.mode).d_einstein_lc_uu


class EMFieldUU:
    """F with both indices up, as a differentiable field."""

    variance = (UP, UP)

    def __init__(self, model, mode="dual"):
        self.model = model
        self.mode = mode

    def components(self, x):
        return GeometrySnapshot(self.model, x, self.mode).F_uu

    def gradient(self, x):
        return GeometrySnapshot(self.model, x, self.mode).dF_uu


def covariant_derivative_arrays(gamma, comps, grad, variance):
    """Raw covariant derivative; the new derivative slot leads."""
    out = np.array(grad, dtype=float)
    for slot, v in enumerate(variance):
        if v == UP:
            term = np.tensordot(gamma, comps, axes=([1], [slot]))
            out += np.moveaxis(term, 1, slot + 1)
        else:
            term = np.tensordot(gamma, comps, axes=([2], [slot]))
            out -= np.moveaxis(term, 1, slot + 1)
    return out


def lc_covariant_derivative(model, x, tensor_field, mode="dual"):
    """Covariant derivative of a tensor field; adds a Down slot in front."""
    snap = GeometrySnapshot(model, x, mode)
    comps = np.asarray(tensor_field.components(x), dtype=float)
    grad = np.asarray(tensor_field.gradient(x), dtype=float)
    var = tuple(tensor_field.variance)
    if comps.shape != (4,) * len(var):
        raise TensorError("tensor field components have the wrong shape")
    out = covariant_derivative_arrays(snap.gamma_lc, comps, grad, var)
    return Tensor((DOWN,) + var, out)
