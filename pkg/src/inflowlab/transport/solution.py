"""
Lagrangian Solution
===================

Pointwise evaluation of

    Y₋(t, x) = B₋ Y₀(γ₀) + ∫₀ᵗ ∇η(s, t; z) g(s, z) ds          (Minus region)
    Y₊(t, x) = B₊ H(τ, γ) + ∫_τᵗ ∇η(s, t; z) g(s, z) ds        (Plus region)

with z = η(t, s; x). A single backward pass from t carries the position z
and J(s) = ∇η(t, s; x); since ∇η(s, t; z) = J(s)⁻¹, both the pushforward
and the Duhamel integrand are linear solves against J. The integral uses
composite Simpson over the integration nodes of that pass.

Points in the S-band are evaluated by both formulas and averaged.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from inflowlab.constants import (
    BISECTION_TOL_FRACTION,
    DEFAULT_FD_STEP,
    DEFAULT_ODE_STEP,
    DEFAULT_S_BAND,
    EXTENSION_MARGIN_FRACTION,
    MIN_QUADRATURE_NODES,
    TANGENCY_THRESHOLD,
    Region
)
from inflowlab.core.exceptions import (
    ConfigError,
    FormulaInapplicableError,
    QuadratureError
)
from inflowlab.entry.regions import regions_from_phi
from inflowlab.entry.tracing import trace_to_inflow
from inflowlab.flowmap.integrator import integrate_batch, step_counts
from inflowlab.geometry.domain import ChannelDomain, FloatArray
from inflowlab.geometry.fields import ZeroField
from inflowlab.transport.problem import ProblemData
from inflowlab.utils.logger import get_logger

log = get_logger(__name__)


@dataclass(frozen=True)
class SolverSettings:
    """Numerical parameters of the Lagrangian solver."""
    ode_step: float = DEFAULT_ODE_STEP
    s_band: float = DEFAULT_S_BAND
    bisection_tol: float | None = None
    quadrature_order: int = MIN_QUADRATURE_NODES
    fd_step: float = DEFAULT_FD_STEP
    margin: float = EXTENSION_MARGIN_FRACTION
    tangency: float = TANGENCY_THRESHOLD

    def __post_init__(self) -> None:
        if not self.ode_step > 0.0:
            raise ConfigError(f"ODE step must be positive, got {self.ode_step}",
                              key="time.ode_step")
        if self.quadrature_order < MIN_QUADRATURE_NODES:
            raise QuadratureError(f"Simpson quadrature needs at least {MIN_QUADRATURE_NODES} "
                                  f"nodes, got {self.quadrature_order}",
                                  key="tolerances.quadrature_order")
        if self.s_band < 0.0:
            raise ConfigError("s_band must be non-negative", key="tolerances.s_band")

    @property
    def band_width(self) -> float:
        return self.s_band * self.ode_step

    @property
    def min_intervals(self) -> int:
        return max(2, self.quadrature_order - 1)

    def tolerance(self, domain: ChannelDomain) -> float:
        if self.bisection_tol is not None:
            return self.bisection_tol
        return BISECTION_TOL_FRACTION * domain.Lx


@dataclass(frozen=True, eq=False)
class PointSolution:
    """Y and its two parts at a batch of points, with region labels and φ."""
    values: FloatArray
    pushforward: FloatArray
    duhamel: FloatArray
    region: NDArray[np.int8]
    phi: FloatArray


class LagrangianSolver:
    """
    Evaluates the Lagrangian solution of one problem at arbitrary
    space-time points. Evaluation is pure and per point, so batches can be
    split across threads freely.
    """

    def __init__(self, data: ProblemData, domain: ChannelDomain,
                 settings: SolverSettings | None = None):
        self.data = data
        self.domain = domain
        self.settings = settings or SolverSettings()
        self._tol = self.settings.tolerance(domain)

    def __repr__(self) -> str:
        return f"LagrangianSolver({self.data.name!r}, h={self.settings.ode_step})"

    # ---------------------------------------------------------
    # BACKWARD PASSES
    # ---------------------------------------------------------
    def _backward(self, t: ArrayLike, t_end: FloatArray,
                  x: FloatArray) -> tuple[FloatArray, FloatArray, FloatArray]:
        """
        Integrates from t down to t_end, returning η(t, t_end; x), its
        Jacobian and the Duhamel integral over [t_end, t].
        """
        n = x.shape[0]
        start = np.broadcast_to(np.asarray(t, dtype=np.float64), (n,))
        span = start - t_end
        counts = step_counts(span, self.settings.ode_step,
                             minimum=self.settings.min_intervals, even=True)
        duhamel = np.zeros((n, 3))
        g = self.data.g

        def accumulate(k: int, idx: NDArray[np.intp], s: FloatArray, eta: FloatArray,
                       jac: FloatArray | None) -> None:
            integrand = np.linalg.solve(jac, g.eval(s, eta)[..., None])[..., 0]
            last = counts[idx]
            weight = np.where((k == 0) | (k == last), 1.0, np.where(k % 2 == 1, 4.0, 2.0))
            duhamel[idx] += weight[:, None] * integrand

        on_node = None if isinstance(g, ZeroField) else accumulate
        eta, jac = integrate_batch(self.data.u, start, t_end, x, self.settings.ode_step,
                                   n_steps=counts, check_slab=False, on_node=on_node)
        duhamel *= (span / (3.0 * counts))[:, None]
        return eta, jac, duhamel

    def _minus_branch(self, t: ArrayLike, x: FloatArray) -> tuple[FloatArray, FloatArray, FloatArray]:
        eta, jac, duhamel = self._backward(t, np.zeros(x.shape[0]), x)
        push = np.linalg.solve(jac, self.data.Y0.eval(0.0, eta)[..., None])[..., 0]
        return push, duhamel, eta[:, 0]

    def phi(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        """φ(t, x) = η₁(t, 0; x) from the same backward pass the Minus formula uses."""
        pts = np.asarray(x, dtype=np.float64).reshape(-1, 3)
        times = np.broadcast_to(np.asarray(t, dtype=np.float64), (pts.shape[0],))
        counts = step_counts(times, self.settings.ode_step,
                             minimum=self.settings.min_intervals, even=True)
        eta, _ = integrate_batch(self.data.u, times, 0.0, pts, self.settings.ode_step,
                                 jacobian=False, n_steps=counts, check_slab=False)
        return eta[:, 0]

    def _plus_branch(self, t: ArrayLike, x: FloatArray) -> tuple[FloatArray, FloatArray]:
        latest = float(np.max(t))
        floor = -(latest + 1.0)
        region, tau, gamma = trace_to_inflow(self.data.u, t, x, self.settings.ode_step,
                                             self._tol, floor)
        if np.any(region == Region.MINUS):
            j = int(np.flatnonzero(region == Region.MINUS)[0])
            raise FormulaInapplicableError("The inflow formula needs a backward crossing "
                                           "of Γ₊", time=latest, point=tuple(x[j]))
        _, jac, duhamel = self._backward(t, tau, x)
        push = np.linalg.solve(jac, self.data.H.eval(tau, gamma)[..., None])[..., 0]
        return push, duhamel

    # ---------------------------------------------------------
    # PUBLIC EVALUATION
    # ---------------------------------------------------------
    def evaluate(self, t: ArrayLike, x: ArrayLike) -> PointSolution:
        """
        Region-dispatched solution at points x (shape (n, 3)). The time is a
        scalar or one time per point.
        """
        pts = np.asarray(x, dtype=np.float64).reshape(-1, 3)
        n = pts.shape[0]
        times = np.broadcast_to(np.asarray(t, dtype=np.float64), (n,))
        push_m, duh_m, phi = self._minus_branch(times, pts)
        region = regions_from_phi(phi, self.settings.band_width)

        push = np.where((region == Region.MINUS)[:, None], push_m, 0.0)
        duhamel = np.where((region == Region.MINUS)[:, None], duh_m, 0.0)
        need = np.flatnonzero(region != Region.MINUS)
        if need.size:
            push_p, duh_p = self._plus_branch(times[need], pts[need])
            band = region[need] == Region.ON_S
            weight = np.where(band, 0.5, 1.0)[:, None]
            push[need] = weight * push_p + np.where(band[:, None], 0.5 * push_m[need], 0.0)
            duhamel[need] = weight * duh_p + np.where(band[:, None], 0.5 * duh_m[need], 0.0)
        log.debug("Evaluated %d points up to t=%.6g", n, float(np.max(times, initial=0.0)))
        return PointSolution(push + duhamel, push, duhamel, region, phi)

    def evaluate_branch(self, t: ArrayLike, x: ArrayLike, region: Region) -> FloatArray:
        """Evaluates one formula regardless of where the points lie."""
        pts = np.asarray(x, dtype=np.float64).reshape(-1, 3)
        match region:
            case Region.MINUS:
                push, duhamel, _ = self._minus_branch(t, pts)
            case Region.PLUS:
                push, duhamel = self._plus_branch(t, pts)
            case _:
                raise ConfigError("A branch is either PLUS or MINUS", key="region")
        return push + duhamel

    def branch_parts(self, t: float, x: ArrayLike,
                     region: Region) -> tuple[FloatArray, FloatArray]:
        """(pushforward, Duhamel) of one formula at points x."""
        pts = np.asarray(x, dtype=np.float64).reshape(-1, 3)
        if region is Region.MINUS:
            push, duhamel, _ = self._minus_branch(t, pts)
            return push, duhamel
        return self._plus_branch(t, pts)


# ---------------------------------------------------------
# PER-POINT OPERATIONS
# ---------------------------------------------------------
def _single(data: ProblemData, domain: ChannelDomain | None,
            settings: SolverSettings | None) -> LagrangianSolver:
    return LagrangianSolver(data, domain or ChannelDomain(), settings)


def _require_region(solver: LagrangianSolver, t: float, x: FloatArray, want: Region) -> None:
    side = Region.MINUS if solver.phi(t, x)[0] > 0.0 else Region.PLUS
    if side is not want:
        raise FormulaInapplicableError(f"Point lies in the {side.name} region, "
                                       f"not {want.name}", time=t, point=tuple(x))


def pushforward_interior(data: ProblemData, t: float, x: ArrayLike,
                         domain: ChannelDomain | None = None,
                         settings: SolverSettings | None = None) -> FloatArray:
    """B₋ Y₀(γ₀) for a point of the Minus region."""
    solver = _single(data, domain, settings)
    pt = np.asarray(x, dtype=np.float64).reshape(3)
    _require_region(solver, t, pt, Region.MINUS)
    return solver.branch_parts(t, pt, Region.MINUS)[0][0]


def pushforward_inflow(data: ProblemData, t: float, x: ArrayLike,
                       domain: ChannelDomain | None = None,
                       settings: SolverSettings | None = None) -> FloatArray:
    """B₊ H(τ, γ) for a point of the Plus region."""
    solver = _single(data, domain, settings)
    pt = np.asarray(x, dtype=np.float64).reshape(3)
    _require_region(solver, t, pt, Region.PLUS)
    return solver.branch_parts(t, pt, Region.PLUS)[0][0]


def duhamel_G(data: ProblemData, t: float, x: ArrayLike,
              domain: ChannelDomain | None = None,
              settings: SolverSettings | None = None) -> FloatArray:
    """Duhamel integral with lower limit 0 (Minus) or τ (Plus)."""
    solver = _single(data, domain, settings)
    pt = np.asarray(x, dtype=np.float64).reshape(3)
    region = Region.MINUS if solver.phi(t, pt)[0] > 0.0 else Region.PLUS
    return solver.branch_parts(t, pt, region)[1][0]


def lagrangian_solution(data: ProblemData, t: float, x: ArrayLike,
                        domain: ChannelDomain | None = None,
                        settings: SolverSettings | None = None) -> FloatArray:
    """Y(t, x), averaging both formulas inside the S-band."""
    solver = _single(data, domain, settings)
    return solver.evaluate(t, np.asarray(x, dtype=np.float64).reshape(1, 3)).values[0]
