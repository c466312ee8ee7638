"""Numerical verification engine for a torsionful spacetime geometry whose
contorsion is built from the electromagnetic potential."""

__version__ = "0.1.0"

from .catalog import (  # noqa: F401
    CATALOG_NAMES,
    PhysicalConstants,
    SpacetimeModel,
    catalog_get,
    load_spacetime_file,
    parse_spacetime_text,
)
from .dynamics import (  # noqa: F401
    DustModel,
    IntegratorConfig,
    WorldlineState,
    exchange_identities,
    integrate_worldline,
    lorentz_rhs,
    normalize_velocity,
    rc_transport_residual,
)
from .electromagnetism import (  # noqa: F401
    chern_simons_density,
    current,
    field_strength,
    homogeneous_maxwell_residual,
    stress_energy,
)
from .engine import GeometrySnapshot, snapshot  # noqa: F401
from .errors import (  # noqa: F401
    ConsistencyError,
    DomainError,
    EvalError,
    GeometryError,
    MetricError,
    ParseError,
    SignatureError,
    SpacetimeFormatError,
    TensorError,
    UnknownIdentifierError,
)
from .expr import ChartSpec  # noqa: F401
from .fields import ExprField, finite_difference_derivatives  # noqa: F401
from .gauge import (  # noqa: F401
    gauge_curvature_shift,
    gauge_invariance_suite,
    transform_potential,
    transformed_contorsion,
)
from .levi_civita import (  # noqa: F401
    ConnectionCoefficients,
    CurvatureAtPoint,
    christoffel,
    contracted_bianchi_residual,
    lc_covariant_derivative,
    lc_curvature,
    lc_divergence_antisym2,
)
from .riemann_cartan import (  # noqa: F401
    Contorsion,
    Torsion,
    contorsion_from_potential,
    full_connection,
    rc_curvature,
    scalar_curvature_split,
    torsion_from_contorsion,
)
from .tensor import (  # noqa: F401
    DOWN,
    UP,
    MetricAtPoint,
    Tensor,
    antisymmetrize_3,
    contract,
    lower_index,
    outer,
    raise_index,
    scalar_product,
)
