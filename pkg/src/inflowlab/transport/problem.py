"""
Problem Data
============

The data (u, Y₀, H, g, T) of the inflow/outflow transport problem

    ∂_t Y + (u·∇)Y - (Y·∇)u = g    in (0, T) × Ω,
    Y = H                          on (0, T) × Γ₊,
    Y = Y₀                         at t = 0,

with (X·∇)v written as ∇v X. Also builds manufactured problems whose exact
solution is known and validates velocity fields.
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, replace
from functools import reduce

import numpy as np

from inflowlab.constants import DIVERGENCE_TOL, FLUX_BALANCE_TOL
from inflowlab.core.exceptions import (
    ConfigError,
    DataError,
    IncompatibleFluxError,
    SignConditionError
)
from inflowlab.core.expressions import Expr, add, mul, sub
from inflowlab.geometry.boundary import AnalyticBoundary, BoundaryData
from inflowlab.geometry.domain import ChannelDomain, Side
from inflowlab.geometry.fields import (
    SPACE_VARIABLES,
    ExpressionField,
    FieldProvider,
    ZeroField
)
from inflowlab.geometry.operators import surface_integral
from inflowlab.utils.logger import get_logger

log = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class ProblemData:
    """Velocity, initial field, inflow data, forcing and horizon."""
    u: FieldProvider
    Y0: FieldProvider
    H: BoundaryData
    g: FieldProvider
    T: float
    exact: FieldProvider | None = None
    name: str = "custom"

    def __post_init__(self) -> None:
        if not self.T > 0.0:
            raise ConfigError(f"Horizon T must be positive, got {self.T}", key="time.T")

    def with_horizon(self, T: float) -> ProblemData:
        return replace(self, T=float(T))


def lie_forcing(u: ExpressionField, Y: ExpressionField) -> ExpressionField:
    """g = ∂_t Y + ∇Y u - ∇u Y as expression trees."""
    components: list[Expr] = []
    for i in range(3):
        advect = reduce(add, (mul(u.components[k], Y.components[i].diff(v))
                              for k, v in enumerate(SPACE_VARIABLES)))
        stretch = reduce(add, (mul(Y.components[k], u.components[i].diff(v))
                               for k, v in enumerate(SPACE_VARIABLES)))
        components.append(sub(add(Y.components[i].diff("t"), advect), stretch))
    return ExpressionField(components)


def manufacture(u: FieldProvider, Y_exact: ExpressionField, T: float,
                name: str = "manufactured") -> ProblemData:
    """
    Problem data whose solution is `Y_exact`: the forcing is the transport
    operator applied to it, Y₀ its initial value and H its trace on Γ₊.
    All compatibility conditions then hold exactly.
    """
    if isinstance(u, ZeroField):
        u = ExpressionField.parse([0, 0, 0])
    if not isinstance(u, ExpressionField):
        raise ConfigError("Manufactured data needs an analytic velocity", key="scenario.velocity")
    g = lie_forcing(u, Y_exact)
    log.debug("Manufactured forcing: %r", g)
    return ProblemData(u=u, Y0=Y_exact.at_time(0.0), H=AnalyticBoundary(Y_exact), g=g,
                       T=T, exact=Y_exact, name=name)


def check_velocity(u: FieldProvider, domain: ChannelDomain, times: Sequence[float],
                   tol: float = DIVERGENCE_TOL) -> None:
    """
    Validates a velocity at the given times: divergence-free at the grid
    nodes, strictly inflowing on Γ₊ and outflowing on Γ₋, and with balanced
    wall fluxes.

    Raises:
        DataError: The divergence exceeds `tol`.
        SignConditionError: The inflow/outflow sign condition fails.
        IncompatibleFluxError: The inflow and outflow fluxes differ.
    """
    nodes = domain.nodes()
    inflow = domain.boundary_nodes(Side.PLUS)
    outflow = domain.boundary_nodes(Side.MINUS)
    for t in times:
        grad = u.grad(t, nodes)
        scale = max(1.0, float(np.max(np.abs(grad))))
        div = np.abs(np.trace(grad, axis1=-2, axis2=-1))
        if float(np.max(div)) > tol * scale:
            raise DataError(f"Velocity is not divergence-free (max |div u| = "
                            f"{float(np.max(div)):.3e})", key="scenario.velocity", time=t)

        u_in = u.eval(t, inflow)[..., 0]
        u_out = u.eval(t, outflow)[..., 0]
        if float(np.min(u_in)) <= 0.0:
            raise SignConditionError("Uⁿ must be negative on Γ₊ (u1 > 0 at x1 = 0)",
                                     time=t, point=f"min u1 = {float(np.min(u_in)):.3e}")
        if float(np.min(u_out)) <= 0.0:
            raise SignConditionError("Uⁿ must be positive on Γ₋ (u1 > 0 at x1 = Lx)",
                                     time=t, point=f"min u1 = {float(np.min(u_out)):.3e}")

        flux_in = float(surface_integral(u_in, domain))
        flux_out = float(surface_integral(u_out, domain))
        if abs(flux_in - flux_out) > FLUX_BALANCE_TOL * max(1.0, abs(flux_in)):
            raise IncompatibleFluxError(f"Wall fluxes differ: inflow {flux_in:.6g}, "
                                        f"outflow {flux_out:.6g}", time=t)
    log.debug("Velocity validated at %d sample times", len(times))
