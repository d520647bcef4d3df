"""
inflowlab Geometry Package
==========================

The periodic channel, its grid fields, the discrete differential operators,
interpolation, field providers and the Hölder seminorm estimator.

Core Capabilities:
------------------
* Domain: `ChannelDomain` with the inflow wall Γ₊ (x1 = 0) and the outflow
  wall Γ₋ (x1 = Lx); `GridVectorField` snapshots.
* Operators: divergence, curl, surface divergence and gradient, volume and
  surface quadrature.
* Providers: analytic `ExpressionField`, sampled `GriddedField`, inflow
  `BoundaryField` and their time-shifted restarts.
"""

__version__ = "0.1.0"

from .domain import ChannelDomain, GridVectorField, Side
from .operators import (
    curl,
    divergence,
    gradient,
    jacobian,
    surface_divergence,
    surface_gradient,
    surface_integral,
    volume_integral,
    volume_mean,
    l2_norm
)
from .interpolation import interpolate, SpatialSpline
from .fields import (
    FieldProvider,
    ExpressionField,
    ZeroField,
    GriddedField,
    TimeShiftedField
)
from .boundary import (
    BoundaryData,
    AnalyticBoundary,
    BoundaryField,
    TimeShiftedBoundary
)
from .holder import holder_seminorm

__all__ = [
    "ChannelDomain",
    "GridVectorField",
    "Side",
    "curl",
    "divergence",
    "gradient",
    "jacobian",
    "surface_divergence",
    "surface_gradient",
    "surface_integral",
    "volume_integral",
    "volume_mean",
    "l2_norm",
    "interpolate",
    "SpatialSpline",
    "FieldProvider",
    "ExpressionField",
    "ZeroField",
    "GriddedField",
    "TimeShiftedField",
    "BoundaryData",
    "AnalyticBoundary",
    "BoundaryField",
    "TimeShiftedBoundary",
    "holder_seminorm"
]
