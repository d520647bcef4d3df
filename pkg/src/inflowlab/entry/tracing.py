"""
Entry Tracing
=============

Backward characteristics from (t, x) to the inflow wall Γ₊ = {x1 = 0}.

Points whose backward trajectory meets Γ₊ at a time τ > t_floor are in the
Plus region and carry the entry time τ and entry point γ; points whose
trajectory survives to t_floor strictly inside the channel are in the Minus
region and carry their origin γ₀ = η(t, t_floor; x). The crossing is located
by a sign change of x1 across a backward RK4 step followed by bisection on
the length of that single sub-step.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from inflowlab.constants import (
    BISECTION_TOL_FRACTION,
    DEFAULT_FD_STEP,
    MAX_BISECTION_ITERATIONS,
    MAX_TRACE_STEPS,
    TANGENCY_THRESHOLD,
    Region
)
from inflowlab.core.exceptions import (
    DataError,
    NearTangencyError,
    SignConditionError,
    StepLimitError
)
from inflowlab.flowmap.integrator import (
    check_state,
    dt1_eta,
    integrate_batch,
    integrate_flow,
    rk4_step
)
from inflowlab.geometry.domain import FloatArray
from inflowlab.geometry.fields import FieldProvider
from inflowlab.utils.logger import get_logger

log = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class EntryRecord:
    """Characteristics data of one space-time point."""
    region: Region
    tau: float
    gamma: FloatArray | None
    gamma0: FloatArray | None
    B: FloatArray


@dataclass(frozen=True, eq=False)
class EntryBatch:
    """
    Vectorised entry data. Invalid entries are NaN: `gamma` for Minus
    points, `gamma0` for Plus points. `tau` is -inf for Minus points.
    """
    region: NDArray[np.int8]
    tau: FloatArray
    gamma: FloatArray
    gamma0: FloatArray
    B: FloatArray

    def __len__(self) -> int:
        return int(self.region.size)

    def record(self, i: int) -> EntryRecord:
        region = Region(int(self.region[i]))
        gamma = None if region is Region.MINUS else self.gamma[i].copy()
        gamma0 = None if region is Region.PLUS else self.gamma0[i].copy()
        return EntryRecord(region, float(self.tau[i]), gamma, gamma0, self.B[i].copy())


def default_tolerance(lx: float) -> float:
    return BISECTION_TOL_FRACTION * lx


def _bisect_crossing(u: FieldProvider, s: FloatArray, sigma: FloatArray, pos: FloatArray,
                     tol: float) -> tuple[FloatArray, FloatArray]:
    """
    Finds the sub-step length σ* in (0, sigma] at which the backward RK4 step
    from `pos` lands on x1 = 0 within tol.
    """
    lo = np.zeros_like(sigma)
    hi = sigma.copy()
    mid = hi.copy()
    point, _ = rk4_step(u, s, -hi, pos, None)
    done = np.abs(point[:, 0]) <= tol
    for _ in range(MAX_BISECTION_ITERATIONS):
        if np.all(done):
            break
        open_ = np.flatnonzero(~done)
        mid[open_] = 0.5 * (lo[open_] + hi[open_])
        trial, _ = rk4_step(u, s[open_], -mid[open_], pos[open_], None)
        point[open_] = trial
        hit = np.abs(trial[:, 0]) <= tol
        above = trial[:, 0] > 0.0
        lo[open_] = np.where(~hit & above, mid[open_], lo[open_])
        hi[open_] = np.where(~hit & ~above, mid[open_], hi[open_])
        done[open_] = hit
    if not np.all(done):
        log.warning("Crossing bisection stopped at the iteration cap for %d points",
                    int(np.count_nonzero(~done)))
    return mid, point


def trace_to_inflow(u: FieldProvider, t: ArrayLike, x: ArrayLike, h: float, tol: float,
                    t_floor: float = 0.0,
                    x1_max: float | None = None) -> tuple[NDArray[np.int8], FloatArray, FloatArray]:
    """
    Traces a batch of points backward until they cross Γ₊ or reach t_floor.

    Returns:
        (region, tau, position): `position` is γ for Plus points and the
        origin at t_floor otherwise.

    Raises:
        SignConditionError: A backward trajectory exits through Γ₋.
        StepLimitError: The step budget is exceeded.
    """
    pos = np.array(x, dtype=np.float64, copy=True).reshape(-1, 3)
    n = pos.shape[0]
    s = np.broadcast_to(np.asarray(t, dtype=np.float64), (n,)).copy()
    if n and np.max(s - t_floor) / h > MAX_TRACE_STEPS:
        raise StepLimitError(f"Tracing back to {t_floor:.6g} needs more than "
                             f"{MAX_TRACE_STEPS} steps", time=float(np.max(s)))

    region = np.full(n, Region.MINUS, dtype=np.int8)
    tau = np.full(n, -np.inf)

    on_wall = np.abs(pos[:, 0]) <= tol
    entered = on_wall & (s > t_floor)
    region[entered] = Region.PLUS
    tau[entered] = s[entered]
    region[on_wall & ~entered] = Region.ON_S
    tau[on_wall & ~entered] = t_floor
    pos[on_wall, 0] = 0.0

    active = ~on_wall & (s > t_floor)
    for _ in range(MAX_TRACE_STEPS):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        s_next = np.maximum(s[idx] - h, t_floor)
        sigma = s[idx] - s_next
        new_pos, _ = rk4_step(u, s[idx], -sigma, pos[idx], None)
        check_state(u, new_pos, s_next)

        if x1_max is not None:
            escaped = new_pos[:, 0] > x1_max + tol
            if np.any(escaped):
                j = int(np.flatnonzero(escaped)[0])
                raise SignConditionError(
                    "Backward trajectory exits through the outflow wall; "
                    "the velocity violates the inflow/outflow sign condition",
                    time=float(s_next[j]), point=tuple(float(c) for c in new_pos[j]))

        crossed = new_pos[:, 0] <= 0.0
        if np.any(crossed):
            c_idx = idx[crossed]
            sigma_star, gamma = _bisect_crossing(u, s[c_idx], sigma[crossed], pos[c_idx], tol)
            gamma[:, 0] = 0.0
            region[c_idx] = Region.PLUS
            tau[c_idx] = s[c_idx] - sigma_star
            pos[c_idx] = gamma
            active[c_idx] = False

        keep = ~crossed
        k_idx = idx[keep]
        pos[k_idx] = new_pos[keep]
        s[k_idx] = s_next[keep]
        finished = k_idx[s_next[keep] <= t_floor]
        active[finished] = False
        near = finished[np.abs(pos[finished, 0]) <= tol]
        region[near] = Region.ON_S
        tau[near] = t_floor
    else:
        raise StepLimitError("Entry tracing exceeded the step budget")
    return region, tau, pos


def trace_entries(u: FieldProvider, t: float, x: ArrayLike, h: float,
                  tol: float | None = None, t_floor: float = 0.0,
                  x1_max: float | None = None, lx: float = 1.0) -> EntryBatch:
    """
    Entry records for a batch of points at time t, with B± obtained by
    integrating the variational equation forward from the located origin.
    """
    tol = default_tolerance(lx) if tol is None else tol
    region, tau, pos = trace_to_inflow(u, t, x, h, tol, t_floor, x1_max)
    n = region.size
    gamma = np.full((n, 3), np.nan)
    gamma0 = np.full((n, 3), np.nan)
    plus = region == Region.PLUS
    gamma[plus] = pos[plus]
    gamma0[~plus] = pos[~plus]
    on_s = region == Region.ON_S
    gamma[on_s] = pos[on_s]
    gamma[on_s, 0] = 0.0

    start = np.where(plus, tau, t_floor)
    origin = np.where(plus[:, None], gamma, gamma0)
    B = np.broadcast_to(np.eye(3), (n, 3, 3)).copy()
    if n:
        _, jac = integrate_batch(u, start, t, origin, h)
        B = jac
    return EntryBatch(region, tau, gamma, gamma0, B)


def locate_entry(u: FieldProvider, t: float, x: ArrayLike, h: float,
                 tol: float | None = None, x1_max: float | None = None,
                 lx: float = 1.0) -> EntryRecord:
    """Entry record of a single point (τ, γ, γ₀ and B±)."""
    batch = trace_entries(u, t, np.asarray(x, dtype=np.float64).reshape(1, 3), h,
                          tol, 0.0, x1_max, lx)
    return batch.record(0)


def levelset_phi(u: FieldProvider, t: float, x: ArrayLike, h: float,
                 check_slab: bool = True) -> FloatArray:
    """φ(t, x) = η₁(t, 0; x); negative in the Plus region, positive in Minus."""
    pts = np.asarray(x, dtype=np.float64)
    eta, _ = integrate_batch(u, t, 0.0, pts.reshape(-1, 3), h, jacobian=False,
                             check_slab=check_slab)
    return eta[:, 0].reshape(pts.shape[:-1])


# ---------------------------------------------------------
# ENTRY GRADIENTS
# ---------------------------------------------------------
@dataclass(frozen=True, eq=False)
class EntryGradients:
    """Dτ (length 4) and Dγ (3x4) with D = (∂_t, ∇)."""
    dtau: FloatArray
    dgamma: FloatArray
    tau: float
    gamma: FloatArray


def entry_gradients(u: FieldProvider, t: float, x: ArrayLike, h: float, *,
                    tol: float | None = None,
                    fd_step: float = DEFAULT_FD_STEP,
                    mode: str = "fd",
                    tangency: float = TANGENCY_THRESHOLD,
                    t_floor: float = 0.0,
                    lx: float = 1.0) -> EntryGradients:
    """
    Closed-form derivatives of the entry time and entry point:

        Dτ = -(Dη)ᵀ n / Uⁿ(τ, γ),     Dγ = Dη + u(τ, γ) ⊗ Dτ,

    where Dη = [∂_{t1} η, ∇η] is taken at (t, x) with t2 = τ. The t1
    derivative is a centered difference (`mode="fd"`) or the self-transport
    identity -∇η u(t, x) (`mode="closed"`).

    Raises:
        DataError: The point is not in the Plus region.
        NearTangencyError: |Uⁿ(τ, γ)| is below `tangency`.
    """
    point = np.asarray(x, dtype=np.float64).reshape(3)
    tol = default_tolerance(lx) if tol is None else tol
    region, tau_arr, pos = trace_to_inflow(u, t, point[None], h, tol, t_floor)
    if region[0] == Region.MINUS:
        raise DataError("Entry gradients need a point whose trajectory enters through Γ₊",
                        time=t, point=tuple(point))
    tau = float(tau_arr[0])
    gamma = pos[0].copy()
    gamma[0] = 0.0

    grad_eta = integrate_flow(u, t, tau, point, h).grad_eta
    if mode == "closed":
        d_t1 = -grad_eta @ u.eval(t, point)
    else:
        d_t1 = dt1_eta(u, t, tau, point, h, fd_step)
    d_eta = np.column_stack([d_t1, grad_eta])

    vel = u.eval(tau, gamma)
    if abs(vel[0]) < tangency:
        raise NearTangencyError(f"|Uⁿ| = {abs(vel[0]):.3e} at the entry point",
                                time=tau, point=tuple(gamma))
    dtau = -d_eta[0] / vel[0]
    dgamma = d_eta + np.outer(vel, dtau)
    return EntryGradients(dtau, dgamma, tau, gamma)
