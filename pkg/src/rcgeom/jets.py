"""Truncated Taylor scalars carrying exact derivatives, up to third order.

A Jet holds the value of a scalar at a point together with its gradient,
Hessian, and optionally third-derivative tensor with respect to the four
chart coordinates.  Arithmetic and the supported elementary functions
propagate every carried order exactly, so results are correct to roundoff
with no step size anywhere.  Order 2 is the workhorse; order 3 exists for
the few pipelines that differentiate a computed field (current divergence,
contracted Bianchi identity).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import EvalError

DIM = 4


def _sym3(h, v):
    # h_ij v_k + h_ik v_j + h_jk v_i
    a = np.multiply.outer(h, v)
    return a + a.transpose(0, 2, 1) + a.transpose(2, 0, 1)


def _readonly(arr):
    arr.flags.writeable = False
    return arr


# Shared seed templates.  Every arithmetic operation allocates fresh output
# arrays, so these are never written to.
_UNIT = _readonly(np.eye(DIM))
ZERO_G = _readonly(np.zeros(DIM))
ZERO_H = _readonly(np.zeros((DIM, DIM)))
ZERO_T = _readonly(np.zeros((DIM, DIM, DIM)))


class Jet:
    """Scalar value plus derivatives along the 4 chart axes."""

    __slots__ = ("f", "g", "h", "t")

    def __init__(self, f, g, h=None, t=None):
        self.f = f
        self.g = g
        self.h = h
        self.t = t

    @property
    def order(self):
        if self.t is not None:
            return 3
        return 2 if self.h is not None else 1

    @staticmethod
    def seed(value, axis, order=2):
        """Jet representing the coordinate x_axis itself."""
        return Jet(
            float(value),
            _UNIT[axis],
            ZERO_H if order >= 2 else None,
            ZERO_T if order >= 3 else None,
        )

    @staticmethod
    def constant(value, order=2):
        return Jet(
            float(value),
            ZERO_G,
            ZERO_H if order >= 2 else None,
            ZERO_T if order >= 3 else None,
        )

    # -- ring operations ---------------------------------------------------

    def __neg__(self):
        return Jet(
            -self.f,
            -self.g,
            None if self.h is None else -self.h,
            None if self.t is None else -self.t,
        )

    def __add__(self, o):
        if isinstance(o, Jet):
            return Jet(
                self.f + o.f,
                self.g + o.g,
                None if self.h is None else self.h + o.h,
                None if self.t is None else self.t + o.t,
            )
        return Jet(self.f + o, self.g, self.h, self.t)

    __radd__ = __add__

    def __sub__(self, o):
        if isinstance(o, Jet):
            return Jet(
                self.f - o.f,
                self.g - o.g,
                None if self.h is None else self.h - o.h,
                None if self.t is None else self.t - o.t,
            )
        return Jet(self.f - o, self.g, self.h, self.t)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, Jet):
            f = self.f * o.f
            g = self.g * o.f + o.g * self.f
            h = t = None
            if self.h is not None:
                h = (
                    self.h * o.f
                    + o.h * self.f
                    + np.multiply.outer(self.g, o.g)
                    + np.multiply.outer(o.g, self.g)
                )
            if self.t is not None:
                t = (
                    self.t * o.f
                    + o.t * self.f
                    + _sym3(self.h, o.g)
                    + _sym3(o.h, self.g)
                )
            return Jet(f, g, h, t)
        return Jet(
            self.f * o,
            self.g * o,
            None if self.h is None else self.h * o,
            None if self.t is None else self.t * o,
        )

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, Jet):
            return self * o._reciprocal()
        if o == 0.0:
            raise EvalError("division by zero")
        return self * (1.0 / o)

    def __rtruediv__(self, o):
        return self._reciprocal() * o

    def __pow__(self, p):
        return jet_pow(self, p)

    def __rpow__(self, base):
        return jet_pow(base, self)

    def __repr__(self):
        return f"Jet({self.f!r}, order={self.order})"

    # -- composition with a smooth scalar function --------------------------

    def compose(self, d0, d1, d2=0.0, d3=0.0):
        """Chain rule for f = phi(u) given phi and its derivatives at u."""
        g = d1 * self.g
        h = t = None
        if self.h is not None:
            h = d1 * self.h + d2 * np.multiply.outer(self.g, self.g)
        if self.t is not None:
            ggg = np.multiply.outer(np.multiply.outer(self.g, self.g), self.g)
            t = d1 * self.t + d2 * _sym3(self.h, self.g) + d3 * ggg
        return Jet(d0, g, h, t)

    def _reciprocal(self):
        v = self.f
        if v == 0.0:
            raise EvalError("division by zero")
        iv = 1.0 / v
        return self.compose(iv, -iv * iv, 2.0 * iv**3, -6.0 * iv**4)


# -- elementary functions, generic over float | Jet --------------------------


def jet_sin(u):
    if isinstance(u, Jet):
        s, c = math.sin(u.f), math.cos(u.f)
        return u.compose(s, c, -s, -c)
    return math.sin(u)


def jet_cos(u):
    if isinstance(u, Jet):
        s, c = math.sin(u.f), math.cos(u.f)
        return u.compose(c, -s, -c, s)
    return math.cos(u)


def jet_tan(u):
    if isinstance(u, Jet):
        f = math.tan(u.f)
        s = 1.0 + f * f
        return u.compose(f, s, 2.0 * f * s, 2.0 * s * (s + 2.0 * f * f))
    return math.tan(u)


def jet_sinh(u):
    if isinstance(u, Jet):
        s, c = math.sinh(u.f), math.cosh(u.f)
        return u.compose(s, c, s, c)
    return math.sinh(u)


def jet_cosh(u):
    if isinstance(u, Jet):
        s, c = math.sinh(u.f), math.cosh(u.f)
        return u.compose(c, s, c, s)
    return math.cosh(u)


def jet_tanh(u):
    if isinstance(u, Jet):
        f = math.tanh(u.f)
        s = 1.0 - f * f
        return u.compose(f, s, -2.0 * f * s, -2.0 * s * (s - 2.0 * f * f))
    return math.tanh(u)


def jet_exp(u):
    v = u.f if isinstance(u, Jet) else u
    try:
        e = math.exp(v)
    except OverflowError as err:
        raise EvalError(f"exp overflow at argument {v!r}") from err
    if isinstance(u, Jet):
        return u.compose(e, e, e, e)
    return e


def jet_log(u):
    v = u.f if isinstance(u, Jet) else u
    if v <= 0.0:
        raise EvalError(f"log of non-positive argument {v!r}")
    if isinstance(u, Jet):
        iv = 1.0 / v
        return u.compose(math.log(v), iv, -iv * iv, 2.0 * iv**3)
    return math.log(v)


def jet_sqrt(u):
    v = u.f if isinstance(u, Jet) else u
    if v < 0.0:
        raise EvalError(f"sqrt of negative argument {v!r}")
    if isinstance(u, Jet):
        if v == 0.0:
            raise EvalError("sqrt derivative singular at zero")
        r = math.sqrt(v)
        return u.compose(r, 0.5 / r, -0.25 / (r * v), 0.375 / (r * v * v))
    return math.sqrt(v)


def jet_pow(u, p):
    """u ** p for float or Jet operands."""
    if isinstance(p, Jet):
        return jet_exp(p * jet_log(u))
    p = float(p)
    if not isinstance(u, Jet):
        if u == 0.0 and p < 0.0:
            raise EvalError("zero raised to a negative power")
        if u < 0.0 and not p.is_integer():
            raise EvalError(f"fractional power of negative base {u!r}")
        return math.pow(u, p)

    v = u.f
    if v == 0.0:
        if p == 0.0:
            return u.compose(1.0, 0.0)
        if p < 0.0:
            raise EvalError("zero raised to a negative power")
        if not p.is_integer():
            raise EvalError("fractional power of zero has singular derivatives")
        n = int(p)
        d = [0.0, 0.0, 0.0, 0.0]
        if n <= 3:
            d[n] = float(math.factorial(n))
        return u.compose(*d)
    if v < 0.0 and not p.is_integer():
        raise EvalError(f"fractional power of negative base {v!r}")

    c1 = p
    c2 = p * (p - 1.0)
    c3 = c2 * (p - 2.0)
    d0 = v**p
    d1 = 0.0 if c1 == 0.0 else c1 * v ** (p - 1.0)
    d2 = 0.0 if c2 == 0.0 else c2 * v ** (p - 2.0)
    d3 = 0.0 if c3 == 0.0 else c3 * v ** (p - 3.0)
    return u.compose(d0, d1, d2, d3)


FUNCTIONS = {
    "sin": jet_sin,
    "cos": jet_cos,
    "tan": jet_tan,
    "sinh": jet_sinh,
    "cosh": jet_cosh,
    "tanh": jet_tanh,
    "exp": jet_exp,
    "log": jet_log,
    "sqrt": jet_sqrt,
}
