"""
Field Providers
===============

Time-dependent vector fields queried at arbitrary space-time points. Every
provider supplies the value, the spatial gradient (entry [i, k] = ∂_k f^i)
and the time derivative, vectorised over points `x[..., 3]` with `t`
broadcast against `x[..., 0]`.

Second derivatives (`hessian`, `dt_grad`, `dtt`) are a capability: analytic
providers implement them symbolically, sampled providers refuse with
`CapabilityError` rather than differencing noisy data.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Mapping, Sequence
from functools import cached_property

import numpy as np
from numpy.typing import ArrayLike

from inflowlab.core.exceptions import CapabilityError, ConfigError
from inflowlab.core.expressions import Expr, parse_expression
from inflowlab.geometry.domain import ChannelDomain, FloatArray, GridVectorField
from inflowlab.geometry.interpolation import SpaceTimeSpline, SpatialSpline

SPACE_VARIABLES = ("x", "y", "z")


def _points(x: ArrayLike) -> FloatArray:
    pts = np.asarray(x, dtype=np.float64)
    if pts.shape[-1] != 3:
        raise ConfigError(f"Points must have a trailing axis of length 3, got {pts.shape}")
    return pts


def _times(t: ArrayLike, pts: FloatArray) -> FloatArray:
    return np.broadcast_to(np.asarray(t, dtype=np.float64), pts.shape[:-1])


class FieldProvider(ABC):
    """Abstract time-dependent vector field."""

    #: x1 extent the provider can be evaluated on; None means unbounded.
    x1_bounds: tuple[float, float] | None = None
    flavor: str = "analytic"

    @abstractmethod
    def eval(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        """Value, shape (..., 3)."""

    @abstractmethod
    def grad(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        """Spatial gradient, shape (..., 3, 3)."""

    @abstractmethod
    def dt(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        """Time derivative, shape (..., 3)."""

    def hessian(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        """H[..., i, k, m] = ∂_k ∂_m f^i."""
        raise CapabilityError(f"{type(self).__name__} has no second spatial derivatives",
                              key="hessian")

    def dt_grad(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        raise CapabilityError(f"{type(self).__name__} has no mixed derivatives",
                              key="dt_grad")

    def dtt(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        raise CapabilityError(f"{type(self).__name__} has no second time derivative",
                              key="dtt")

    def sample(self, domain: ChannelDomain, t: float) -> GridVectorField:
        """Evaluates the provider at every grid node."""
        return GridVectorField.from_points(domain, self.eval(t, domain.nodes()), t)


class ExpressionField(FieldProvider):
    """
    Analytic provider backed by three expression trees in (t, x, y, z).

    Derivative trees are built on first use and cached.
    """

    def __init__(self, components: Sequence[Expr]):
        if len(components) != 3:
            raise ConfigError(f"A vector field needs 3 expressions, got {len(components)}")
        self.components: tuple[Expr, ...] = tuple(components)

    @classmethod
    def parse(cls, sources: Sequence[str | float],
              constants: Mapping[str, float] | None = None) -> ExpressionField:
        return cls([parse_expression(s, constants) for s in sources])

    def __repr__(self) -> str:
        return f"ExpressionField({', '.join(str(c) for c in self.components)})"

    @cached_property
    def _grad_exprs(self) -> list[list[Expr]]:
        return [[c.diff(v) for v in SPACE_VARIABLES] for c in self.components]

    @cached_property
    def _dt_exprs(self) -> list[Expr]:
        return [c.diff("t") for c in self.components]

    @cached_property
    def _hessian_exprs(self) -> list[list[list[Expr]]]:
        return [[[d.diff(v) for v in SPACE_VARIABLES] for d in row]
                for row in self._grad_exprs]

    @cached_property
    def _dt_grad_exprs(self) -> list[list[Expr]]:
        return [[d.diff("t") for d in row] for row in self._grad_exprs]

    @cached_property
    def _dtt_exprs(self) -> list[Expr]:
        return [d.diff("t") for d in self._dt_exprs]

    @staticmethod
    def _evaluate(exprs: list, t: ArrayLike, x: ArrayLike) -> FloatArray:
        pts = _points(x)
        tt = _times(t, pts)
        env = {"t": tt, "x": pts[..., 0], "y": pts[..., 1], "z": pts[..., 2]}

        def walk(node: list | Expr) -> FloatArray:
            if isinstance(node, Expr):
                return np.broadcast_to(np.asarray(node.evaluate(env), dtype=np.float64),
                                       tt.shape)
            return np.stack([walk(n) for n in node], axis=tt.ndim)

        return np.array(walk(exprs))

    def eval(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self._evaluate(list(self.components), t, x)

    def grad(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self._evaluate(self._grad_exprs, t, x)

    def dt(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self._evaluate(self._dt_exprs, t, x)

    def hessian(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self._evaluate(self._hessian_exprs, t, x)

    def dt_grad(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self._evaluate(self._dt_grad_exprs, t, x)

    def dtt(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self._evaluate(self._dtt_exprs, t, x)

    def at_time(self, t0: float) -> ExpressionField:
        """The field frozen at time t0 (time-independent)."""
        return ExpressionField([c.subs("t", t0) for c in self.components])


class ZeroField(FieldProvider):
    """The zero field; trivially analytic to every order."""

    def _zeros(self, x: ArrayLike, *tail: int) -> FloatArray:
        return np.zeros((*_points(x).shape[:-1], *tail))

    def eval(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self._zeros(x, 3)

    def grad(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self._zeros(x, 3, 3)

    def dt(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self._zeros(x, 3)

    def hessian(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self._zeros(x, 3, 3, 3)

    def dt_grad(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self._zeros(x, 3, 3)

    def dtt(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self._zeros(x, 3)


class GriddedField(FieldProvider):
    """
    Provider interpolating grid snapshots: tricubic in space (periodic in y,
    z, not-a-knot in x1) and cubic in time. A single snapshot gives a
    time-independent field. Beyond the walls x1 is clipped, which
    extrapolates constantly.
    """
    flavor = "gridded"

    def __init__(self, snapshots: Sequence[GridVectorField], coverage_tol: float = 0.0):
        if not snapshots:
            raise ConfigError("GriddedField needs at least one snapshot")
        self.domain = snapshots[0].domain
        self.x1_bounds = (0.0, self.domain.Lx)
        self.times = tuple(float(s.t) for s in snapshots)
        self._static: SpatialSpline | None = None
        self._dynamic: SpaceTimeSpline | None = None
        if len(snapshots) == 1:
            self._static = SpatialSpline(snapshots[0])
        else:
            self._dynamic = SpaceTimeSpline(snapshots, coverage_tol)

    def eval(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        if self._static is not None:
            return self._static(_points(x))
        return self._dynamic(t, _points(x))

    def grad(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        if self._static is not None:
            return self._static.gradient(_points(x))
        return self._dynamic.gradient(t, _points(x))

    def dt(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        if self._static is not None:
            return np.zeros_like(_points(x))
        return self._dynamic(t, _points(x), nu=(1, 0, 0, 0))


class TimeShiftedField(FieldProvider):
    """f(t + shift, x); used to restart the solver at a later origin."""

    def __init__(self, base: FieldProvider, shift: float):
        self.base = base
        self.shift = float(shift)
        self.x1_bounds = base.x1_bounds
        self.flavor = base.flavor

    def _t(self, t: ArrayLike) -> FloatArray:
        return np.asarray(t, dtype=np.float64) + self.shift

    def eval(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self.base.eval(self._t(t), x)

    def grad(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self.base.grad(self._t(t), x)

    def dt(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self.base.dt(self._t(t), x)

    def hessian(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self.base.hessian(self._t(t), x)

    def dt_grad(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self.base.dt_grad(self._t(t), x)

    def dtt(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self.base.dtt(self._t(t), x)
