"""Built-in exact Einstein-Maxwell configurations and a file loader.

Every model bundles a chart, ten metric component fields, four potential
component fields, physical constants, and a default sample grid.  The
``G`` and ``c`` constants are also exposed to expressions as named
parameters so horizons and unit factors can be written symbolically.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EvalError,
    DomainError,
    GeometryError,
    MetricError,
    ParseError,
    SpacetimeFormatError,
)
from .expr import ChartSpec
from .fields import ExprField
from .tensor import MetricAtPoint

CATALOG_NAMES = (
    "minkowski",
    "minkowski-constant-e",
    "schwarzschild",
    "reissner-nordstrom",
    "em-plane-wave",
)


@dataclass(frozen=True)
class PhysicalConstants:
    G: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if self.G <= 0 or self.c <= 0:
            raise GeometryError(f"constants must be positive: G={self.G}, c={self.c}")

    @property
    def coupling(self):
        """The contorsion coupling G / c^4, recomputed on access."""
        return self.G / self.c**4


@dataclass(frozen=True)
class SpacetimeModel:
    name: str
    chart: ChartSpec
    g_fields: tuple  # 4x4 nested tuple, symmetric by shared references
    A_fields: tuple  # 4 scalar fields
    constants: PhysicalConstants
    params: dict
    grid_axes: dict  # coordinate name -> tuple of sample values
    domain: object = None  # scalar field, positive inside the domain
    meta: dict = field(default_factory=dict)

    @property
    def default_grid(self):
        axes = [self.grid_axes[n] for n in self.chart.names]
        return np.array(list(itertools.product(*axes)), dtype=float)

    def in_domain(self, x):
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            return False
        if self.domain is None:
            return True
        try:
            return self.domain.value(x) > 0.0
        except EvalError:
            return False

    def require_in_domain(self, x):
        if not self.in_domain(x):
            raise DomainError(f"point {tuple(np.asarray(x, float))} is outside the domain of {self.name!r}")

    def metric_values(self, x):
        x = np.asarray(x, dtype=float)
        g = np.empty((4, 4))
        for i in range(4):
            for j in range(i, 4):
                g[i, j] = g[j, i] = self.g_fields[i][j].value(x)
        return g

    def metric_at(self, x):
        self.require_in_domain(x)
        return MetricAtPoint.from_components(self.metric_values(x))

    def potential_values(self, x):
        x = np.asarray(x, dtype=float)
        return np.array([f.value(x) for f in self.A_fields])

    def with_potential(self, A_fields, name=None):
        return SpacetimeModel(
            name=name or self.name,
            chart=self.chart,
            g_fields=self.g_fields,
            A_fields=tuple(A_fields),
            constants=self.constants,
            params=self.params,
            grid_axes=self.grid_axes,
            domain=self.domain,
            meta=self.meta,
        )

    def sample_box(self):
        box = self.meta.get("sample_box")
        if box is not None:
            return box
        return {n: (min(v), max(v)) for n, v in self.grid_axes.items()}


def build_model(
    name,
    coord_names,
    g_sources,
    A_sources=None,
    params=None,
    G=1.0,
    c=1.0,
    domain_src=None,
    grid_axes=None,
    meta=None,
    validate=True,
    origin=None,
):
    """Assemble a model from expression sources with symmetric completion."""
    chart = ChartSpec(tuple(coord_names), domain_src)
    params = dict(params or {})
    env = dict(params)
    env["G"] = float(G)
    env["c"] = float(c)

    filled = {}
    for (i, j), src in (g_sources or {}).items():
        if not (0 <= i <= 3 and 0 <= j <= 3):
            raise SpacetimeFormatError(f"metric index out of range: g[{i}][{j}]", origin or name)
        if (j, i) in filled and filled[(j, i)] != src and (i, j) not in filled:
            raise SpacetimeFormatError(
                f"conflicting sources for g[{i}][{j}] and g[{j}][{i}]", origin or name
            )
        filled[(i, j)] = src
        filled.setdefault((j, i), src)

    rows = []
    for i in range(4):
        row = []
        for j in range(4):
            if j < i:
                row.append(rows[j][i])
                continue
            src = filled.get((i, j), "0")
            row.append(ExprField(src, chart, env, name=f"g[{i}][{j}]"))
        rows.append(tuple(row))
    g_fields = tuple(rows)

    A_list = []
    for i in range(4):
        src = (A_sources or {}).get(i, "0")
        A_list.append(ExprField(src, chart, env, name=f"A[{i}]"))

    domain = ExprField(domain_src, chart, env, name="domain") if domain_src else None

    if grid_axes is None:
        raise SpacetimeFormatError("missing required key: grid", origin or name)
    axes = {}
    for n in coord_names:
        if n not in grid_axes:
            raise SpacetimeFormatError(f"missing required key: grid.{n}", origin or name)
        axes[n] = tuple(float(v) for v in grid_axes[n])

    model = SpacetimeModel(
        name=name,
        chart=chart,
        g_fields=g_fields,
        A_fields=tuple(A_list),
        constants=PhysicalConstants(float(G), float(c)),
        params=params,
        grid_axes=axes,
        domain=domain,
        meta=dict(meta or {}),
    )
    if validate:
        validate_on_grid(model, origin=origin)
    return model


def validate_on_grid(model, origin=None):
    """Check metric and potential invariants at every default-grid point."""
    for p in model.default_grid:
        pt = tuple(float(v) for v in p)
        if not model.in_domain(p):
            raise SpacetimeFormatError(
                f"grid point {pt} violates the domain predicate", origin or model.name
            )
        try:
            model.metric_at(p)
        except MetricError as err:
            raise type(err)(f"{err} at grid point {pt}") from err
        a = model.potential_values(p)
        if not np.all(np.isfinite(a)):
            raise SpacetimeFormatError(
                f"potential is not finite at grid point {pt}", origin or model.name
            )


# -- built-in catalog ---------------------------------------------------------


def _box_grid(lo=-0.5, hi=0.5):
    vals = (lo, hi)
    return {"t": vals, "x": vals, "y": vals, "z": vals}


def _static_spherical_grid():
    return {
        "t": (0.0, 0.5),
        "r": tuple(np.linspace(3.0, 10.0, 8)),
        "theta": tuple(np.linspace(0.3, math.pi - 0.3, 4)),
        "phi": (0.1, 2.0),
    }


_CARTESIAN_BOX = {"t": (-1.0, 1.0), "x": (-1.0, 1.0), "y": (-1.0, 1.0), "z": (-1.0, 1.0)}
_SPHERICAL_BOX = {
    "t": (0.0, 1.0),
    "r": (3.0, 10.0),
    "theta": (0.3, math.pi - 0.3),
    "phi": (0.0, 2.0 * math.pi),
}


def catalog_get(name, params=None, G=1.0, c=1.0):
    """Return a built-in model; parameter overrides are merged over defaults."""
    overrides = dict(params or {})
    cartesian = ("t", "x", "y", "z")
    spherical = ("t", "r", "theta", "phi")

    if name == "minkowski":
        return build_model(
            name,
            cartesian,
            {(0, 0): "1", (1, 1): "-1", (2, 2): "-1", (3, 3): "-1"},
            {},
            params=overrides,
            G=G,
            c=c,
            grid_axes=_box_grid(),
            meta={
                "source_free": True,
                "einstein_exact": True,
                "diag_static": True,
                "sample_box": _CARTESIAN_BOX,
            },
        )
    if name == "minkowski-constant-e":
        p = {"E": 1.0, **overrides}
        return build_model(
            name,
            cartesian,
            {(0, 0): "1", (1, 1): "-1", (2, 2): "-1", (3, 3): "-1"},
            {0: "-(E*x)"},
            params=p,
            G=G,
            c=c,
            grid_axes=_box_grid(),
            meta={
                "source_free": True,
                "einstein_exact": False,
                "diag_static": True,
                "sample_box": _CARTESIAN_BOX,
            },
        )
    if name == "schwarzschild":
        p = {"M": 1.0, **overrides}
        f = "1 - 2*G*M/(c^2*r)"
        return build_model(
            name,
            spherical,
            {
                (0, 0): f,
                (1, 1): f"-1/({f})",
                (2, 2): "-r^2",
                (3, 3): "-r^2*sin(theta)^2",
            },
            {},
            params=p,
            G=G,
            c=c,
            domain_src="(r - 2*G*M/c^2) * sin(theta)",
            grid_axes=_static_spherical_grid(),
            meta={
                "source_free": True,
                "einstein_exact": True,
                "diag_static": True,
                "sample_box": _SPHERICAL_BOX,
            },
        )
    if name == "reissner-nordstrom":
        p = {"M": 1.0, "q": 0.3, **overrides}
        f = "1 - 2*G*M/(c^2*r) + G*q^2/(c^4*r^2)"
        return build_model(
            name,
            spherical,
            {
                (0, 0): f,
                (1, 1): f"-1/({f})",
                (2, 2): "-r^2",
                (3, 3): "-r^2*sin(theta)^2",
            },
            {0: "q/r"},
            params=p,
            G=G,
            c=c,
            domain_src="(r - 2*G*M/c^2) * sin(theta)",
            grid_axes=_static_spherical_grid(),
            meta={
                "source_free": True,
                "einstein_exact": True,
                "diag_static": True,
                "sample_box": _SPHERICAL_BOX,
            },
        )
    if name == "em-plane-wave":
        # Transverse polarization; the field is null (F.F = 0) and source free.
        p = {"a": 0.5, "k": 1.0, **overrides}
        return build_model(
            name,
            cartesian,
            {(0, 0): "1", (1, 1): "-1", (2, 2): "-1", (3, 3): "-1"},
            {2: "a*cos(k*(t - x))"},
            params=p,
            G=G,
            c=c,
            grid_axes={
                "t": (0.0, 0.35, 0.8),
                "x": (-0.5, 0.2, 0.9),
                "y": (-0.3, 0.4),
                "z": (-0.2, 0.5),
            },
            meta={
                "source_free": True,
                "einstein_exact": False,
                "diag_static": True,
                "sample_box": _CARTESIAN_BOX,
            },
        )
    raise GeometryError(
        f"unknown catalog entry {name!r}; available: {', '.join(CATALOG_NAMES)}"
    )


# -- definition-file loader ---------------------------------------------------

_LINE_RES = {
    "name": re.compile(r"^name\s*=\s*([A-Za-z_][\w.-]*)\s*$"),
    "coords": re.compile(r"^coords\s*=\s*(.+)$"),
    "param": re.compile(r"^param\s+([A-Za-z_]\w*)\s*=\s*(\S+)\s*$"),
    "const": re.compile(r"^(G|c)\s*=\s*(\S+)\s*$"),
    "g": re.compile(r"^g\[(\d+)\]\[(\d+)\]\s*=\s*\"(.*)\"\s*$"),
    "A": re.compile(r"^A\[(\d+)\]\s*=\s*\"(.*)\"\s*$"),
    "domain": re.compile(r"^domain\s*=\s*\"(.*)\"\s*$"),
    "grid": re.compile(r"^grid\.([A-Za-z_]\w*)\s*=\s*([^:]+):([^:]+):(\d+)\s*$"),
}


def parse_spacetime_text(text, origin="<string>", param_overrides=None):
    """Parse the line-oriented definition format into a model."""
    name = None
    coords = None
    params = {}
    consts = {"G": 1.0, "c": 1.0}
    g_sources = {}
    A_sources = {}
    domain_src = None
    grid_axes = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if m := _LINE_RES["name"].match(line):
            name = m.group(1)
        elif m := _LINE_RES["coords"].match(line):
            coords = tuple(s.strip() for s in m.group(1).split(","))
        elif m := _LINE_RES["param"].match(line):
            try:
                params[m.group(1)] = float(m.group(2))
            except ValueError:
                raise SpacetimeFormatError(
                    f"bad number {m.group(2)!r}", origin, lineno
                ) from None
        elif m := _LINE_RES["const"].match(line):
            try:
                consts[m.group(1)] = float(m.group(2))
            except ValueError:
                raise SpacetimeFormatError(
                    f"bad number {m.group(2)!r}", origin, lineno
                ) from None
        elif m := _LINE_RES["g"].match(line):
            i, j = int(m.group(1)), int(m.group(2))
            if i > 3 or j > 3:
                raise SpacetimeFormatError(f"metric index out of range: g[{i}][{j}]", origin, lineno)
            prev = g_sources.get((i, j))
            if prev is not None and prev != m.group(3):
                raise SpacetimeFormatError(f"duplicate g[{i}][{j}] with a different expression", origin, lineno)
            mirror = g_sources.get((j, i))
            if mirror is not None and mirror != m.group(3):
                raise SpacetimeFormatError(
                    f"g[{i}][{j}] conflicts with g[{j}][{i}]", origin, lineno
                )
            g_sources[(i, j)] = m.group(3)
        elif m := _LINE_RES["A"].match(line):
            i = int(m.group(1))
            if i > 3:
                raise SpacetimeFormatError(f"potential index out of range: A[{i}]", origin, lineno)
            A_sources[i] = m.group(2)
        elif m := _LINE_RES["domain"].match(line):
            domain_src = m.group(1)
        elif m := _LINE_RES["grid"].match(line):
            try:
                start, stop, count = float(m.group(2)), float(m.group(3)), int(m.group(4))
            except ValueError:
                raise SpacetimeFormatError("bad grid range", origin, lineno) from None
            if count < 1:
                raise SpacetimeFormatError("grid count must be >= 1", origin, lineno)
            grid_axes[m.group(1)] = tuple(np.linspace(start, stop, count))
        else:
            raise SpacetimeFormatError(f"unrecognized line: {line!r}", origin, lineno)

    if name is None:
        raise SpacetimeFormatError("missing required key: name", origin)
    if coords is None:
        raise SpacetimeFormatError("missing required key: coords", origin)

    for key, value in (param_overrides or {}).items():
        if key in ("G", "c"):
            consts[key] = float(value)
        elif key in params:
            params[key] = float(value)
        else:
            raise SpacetimeFormatError(
                f"override for undeclared parameter {key!r}", origin
            )

    try:
        return build_model(
            name,
            coords,
            g_sources,
            A_sources,
            params=params,
            G=consts["G"],
            c=consts["c"],
            domain_src=domain_src,
            grid_axes=grid_axes,
            meta={"source_free": False, "einstein_exact": False, "diag_static": False},
            origin=origin,
        )
    except ParseError as err:
        raise SpacetimeFormatError(f"expression error: {err}", origin) from err


def load_spacetime_file(path, param_overrides=None):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_spacetime_text(text, origin=str(path), param_overrides=param_overrides)
