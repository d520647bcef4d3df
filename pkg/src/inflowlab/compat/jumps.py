"""
Jumps Across S
==============

Closed-form prediction and direct measurement of the jump of DY across the
characteristic hypersurface S(t) issued from the corner {t = 0} × Γ₊.

When cond₀ holds, Y is continuous across S and the jump of its space-time
derivative D = (∂_t, ∇) is

    D(Y₊ - Y₋) = B₋ (c ⊗ Dτ),

with c the cond₁ vector at the foot point γ and B₋ = ∇η(0, t; γ).
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from inflowlab.constants import COMPAT_TOL, Region
from inflowlab.core.exceptions import ConfigError, FormulaInapplicableError
from inflowlab.compat.conditions import cond1_vector
from inflowlab.entry.tracing import entry_gradients
from inflowlab.flowmap.integrator import integrate_flow
from inflowlab.geometry.domain import FloatArray
from inflowlab.transport.solution import LagrangianSolver
from inflowlab.utils.logger import get_logger

log = get_logger(__name__)


def jump_oracle(solver: LagrangianSolver, t: float, x: ArrayLike,
                cond0_tol: float = COMPAT_TOL, mode: str = "fd") -> FloatArray:
    """
    Predicted D(Y₊ - Y₋) (3x4) at a point of S(t).

    Raises:
        FormulaInapplicableError: The point is not on S(t) or cond₀ fails at
            its foot point.
    """
    data, settings = solver.data, solver.settings
    point = np.asarray(x, dtype=np.float64).reshape(3)
    phi = float(solver.phi(t, point)[0])
    if abs(phi) > settings.band_width:
        raise FormulaInapplicableError(f"Point is off S(t) (φ = {phi:.3e})",
                                       time=t, point=tuple(point))
    grads = entry_gradients(data.u, t, point, settings.ode_step,
                            tol=settings.tolerance(solver.domain), fd_step=settings.fd_step,
                            mode=mode, tangency=settings.tangency, t_floor=-(t + 1.0),
                            lx=solver.domain.Lx)
    foot = grads.gamma[None]
    mismatch = float(np.linalg.norm(data.H.eval(0.0, foot) - data.Y0.eval(0.0, foot)))
    if mismatch > cond0_tol:
        raise FormulaInapplicableError(f"cond₀ fails at the foot point ({mismatch:.3e}); "
                                       f"Y itself jumps across S",
                                       time=t, point=tuple(grads.gamma))
    c = cond1_vector(data, foot)[0]
    b_minus = integrate_flow(data.u, 0.0, t, grads.gamma, settings.ode_step).grad_eta
    return b_minus @ np.outer(c, grads.dtau)


@dataclass(frozen=True, eq=False)
class JumpMeasurement:
    """Y₊ - Y₋ and D(Y₊ - Y₋) measured at offset ε on either side of S."""
    eps: float
    y_jump: FloatArray
    dy_jump: FloatArray


def surface_normal(solver: LagrangianSolver, t: float, x: FloatArray) -> FloatArray:
    """Unit normal ∇φ/|∇φ| of S(t), pointing into the Minus region."""
    grad_phi = integrate_flow(solver.data.u, t, 0.0, x, solver.settings.ode_step).grad_eta[0]
    return grad_phi / np.linalg.norm(grad_phi)


def _space_time_stencil(t: float, x: FloatArray, d: float) -> tuple[FloatArray, FloatArray]:
    """Times and points of the centered (t, x) stencil, ±d along each axis."""
    times = np.full(8, t)
    pts = np.repeat(x[None], 8, axis=0)
    times[0], times[1] = t + d, t - d
    for k in range(3):
        pts[2 + 2 * k, k] += d
        pts[3 + 2 * k, k] -= d
    return times, pts


def _branch_derivatives(solver: LagrangianSolver, t: float, x: FloatArray, d: float,
                        region: Region) -> tuple[FloatArray, FloatArray]:
    value = solver.evaluate_branch(t, x[None], region)[0]
    times, pts = _space_time_stencil(t, x, d)
    samples = np.stack([solver.evaluate_branch(s, p[None], region)[0]
                        for s, p in zip(times, pts)])
    deriv = (samples[0::2] - samples[1::2]) / (2.0 * d)
    return value, deriv.T


def measure_jump(solver: LagrangianSolver, t: float, x: ArrayLike, eps: float,
                 fd_step: float | None = None) -> JumpMeasurement:
    """
    Straddles S(t) at x ∓ ε n_S, evaluates the Plus formula on the Plus
    side and the Minus formula on the Minus side, and differences the values
    and their centered (t, x) derivatives.

    Raises:
        OutOfDomainError: A straddle point leaves the channel.
    """
    point = np.asarray(x, dtype=np.float64).reshape(3)
    normal = surface_normal(solver, t, point)
    plus_side, minus_side = point - eps * normal, point + eps * normal
    solver.domain.require_inside(np.stack([plus_side, minus_side]))
    d = fd_step if fd_step is not None else min(solver.settings.fd_step, 0.25 * eps)
    y_p, dy_p = _branch_derivatives(solver, t, plus_side, d, Region.PLUS)
    y_m, dy_m = _branch_derivatives(solver, t, minus_side, d, Region.MINUS)
    log.debug("Jump at eps=%.3e: |ΔY|=%.3e", eps, float(np.linalg.norm(y_p - y_m)))
    return JumpMeasurement(float(eps), y_p - y_m, dy_p - dy_m)


@dataclass(frozen=True, eq=False)
class JumpSeries:
    """Measurements at decreasing offsets plus a Richardson estimate."""
    measurements: tuple[JumpMeasurement, ...]
    y_estimate: FloatArray
    dy_estimate: FloatArray

    def to_dict(self) -> dict[str, object]:
        return {
            "eps": [m.eps for m in self.measurements],
            "y_jump": [m.y_jump.tolist() for m in self.measurements],
            "dy_jump": [m.dy_jump.tolist() for m in self.measurements],
            "y_estimate": self.y_estimate.tolist(),
            "dy_estimate": self.dy_estimate.tolist(),
        }


def measure_jump_series(solver: LagrangianSolver, t: float, x: ArrayLike,
                        offsets: Sequence[float]) -> JumpSeries:
    """
    Jumps at ε in `offsets`; the estimate is 2 J(ε) - J(2ε) for the smallest
    ε whose double is also present, or J at the smallest ε otherwise.
    """
    if not offsets:
        raise ConfigError("At least one jump offset is needed", key="checks.jump_offsets")
    ordered = sorted((float(e) for e in offsets), reverse=True)
    series = tuple(measure_jump(solver, t, x, e) for e in ordered)
    by_eps = {m.eps: m for m in series}
    finest = series[-1]
    coarse = next((m for e, m in by_eps.items() if np.isclose(e, 2.0 * finest.eps)), None)
    if coarse is None:
        return JumpSeries(series, finest.y_jump, finest.dy_jump)
    return JumpSeries(series, 2.0 * finest.y_jump - coarse.y_jump,
                      2.0 * finest.dy_jump - coarse.dy_jump)
