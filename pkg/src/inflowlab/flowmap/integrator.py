"""
Flow-Map Integration
====================

Classical RK4 for the flow map η(t1, t2; x), the position at time t2 of the
particle that sits at x at time t1, together with its spatial Jacobian
∇η(t1, t2; x) through the variational equation

    ∂_{t2} ∇η = ∇u(t2, η) ∇η,        ∇η(t1, t1; x) = I.

Batches are vectorised over points. Each point uses its own step count
n = ceil(|t2 - t1| / h) (or an explicit count) and the uniform step
(t2 - t1) / n, so a point's result does not depend on the batch it was
evaluated in.
"""
from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from inflowlab.constants import EXTENSION_MARGIN_FRACTION
from inflowlab.core.exceptions import ConfigError, IntegrationDomainError, NumericError
from inflowlab.geometry.domain import FloatArray
from inflowlab.geometry.fields import FieldProvider
from inflowlab.utils.logger import get_logger

log = get_logger(__name__)

type NodeCallback = Callable[[int, NDArray[np.intp], FloatArray, FloatArray, FloatArray | None], None]


@dataclass(frozen=True, eq=False)
class FlowSample:
    """η(t1, t2; x) and ∇η(t1, t2; x) for one seed point."""
    t1: float
    t2: float
    x: FloatArray
    eta: FloatArray
    grad_eta: FloatArray
    h: float


def step_counts(duration: ArrayLike, h: float, minimum: int = 1,
                even: bool = False) -> NDArray[np.int64]:
    """Per-point RK4 step counts covering |duration| with steps of at most h."""
    if not h > 0.0:
        raise ConfigError(f"ODE step must be positive, got {h}", key="ode_step")
    span = np.abs(np.asarray(duration, dtype=np.float64))
    counts = np.maximum(np.ceil(span / h - 1.0e-9).astype(np.int64), minimum)
    if even:
        counts += counts % 2
    return counts


def _rhs(u: FieldProvider, s: FloatArray, eta: FloatArray,
         jac: FloatArray | None) -> tuple[FloatArray, FloatArray | None]:
    vel = u.eval(s, eta)
    if jac is None:
        return vel, None
    return vel, np.einsum("nik,nkj->nij", u.grad(s, eta), jac)


def rk4_step(u: FieldProvider, s: FloatArray, ds: FloatArray, eta: FloatArray,
             jac: FloatArray | None) -> tuple[FloatArray, FloatArray | None]:
    """One RK4 step of (η, ∇η) from time s with per-point step ds."""
    half = 0.5 * ds[:, None]
    k1x, k1j = _rhs(u, s, eta, jac)
    k2x, k2j = _rhs(u, s + 0.5 * ds, eta + half * k1x,
                    None if jac is None else jac + half[..., None] * k1j)
    k3x, k3j = _rhs(u, s + 0.5 * ds, eta + half * k2x,
                    None if jac is None else jac + half[..., None] * k2j)
    k4x, k4j = _rhs(u, s + ds, eta + ds[:, None] * k3x,
                    None if jac is None else jac + ds[:, None, None] * k3j)
    sixth = ds[:, None] / 6.0
    eta_new = eta + sixth * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    if jac is None:
        return eta_new, None
    jac_new = jac + sixth[..., None] * (k1j + 2.0 * k2j + 2.0 * k3j + k4j)
    return eta_new, jac_new


def check_state(u: FieldProvider, eta: FloatArray, s: FloatArray,
                margin_fraction: float = EXTENSION_MARGIN_FRACTION,
                check_slab: bool = True) -> None:
    """
    Raises on non-finite positions or on trajectories that left the slab on
    which a bounded provider is evaluable.
    """
    finite = np.all(np.isfinite(eta), axis=-1)
    if not np.all(finite):
        i = int(np.flatnonzero(~finite)[0])
        raise NumericError("Flow-map state became non-finite", time=float(s[i]))
    if not check_slab or u.x1_bounds is None:
        return
    lo, hi = u.x1_bounds
    margin = margin_fraction * (hi - lo)
    outside = (eta[:, 0] < lo - margin) | (eta[:, 0] > hi + margin)
    if np.any(outside):
        i = int(np.flatnonzero(outside)[0])
        raise IntegrationDomainError(
            f"Trajectory left the slab [{lo - margin:.4g}, {hi + margin:.4g}]",
            time=float(s[i]), point=tuple(float(c) for c in eta[i]))


def integrate_batch(u: FieldProvider, t1: ArrayLike, t2: ArrayLike, x: ArrayLike, h: float, *,
                    jacobian: bool = True,
                    n_steps: ArrayLike | None = None,
                    margin_fraction: float = EXTENSION_MARGIN_FRACTION,
                    check_slab: bool = True,
                    on_node: NodeCallback | None = None) -> tuple[FloatArray, FloatArray | None]:
    """
    Integrates η and (optionally) ∇η for a batch of seed points.

    Args:
        u: Velocity provider.
        t1, t2: Start and end times, scalars or per-point arrays.
        x: Seed points, shape (n, 3).
        h: Maximal step length.
        jacobian: Whether to transport ∇η.
        n_steps: Explicit per-point step counts (overrides h).
        on_node: Called at every integration node k = 0..n_p with
            (k, active point indices, times, positions, Jacobians).

    Returns:
        (eta, jac): shapes (n, 3) and (n, 3, 3) (jac is None when skipped).
    """
    eta = np.array(x, dtype=np.float64, copy=True).reshape(-1, 3)
    n = eta.shape[0]
    start = np.broadcast_to(np.asarray(t1, dtype=np.float64), (n,)).copy()
    stop = np.broadcast_to(np.asarray(t2, dtype=np.float64), (n,))
    counts = (step_counts(stop - start, h) if n_steps is None
              else np.broadcast_to(np.asarray(n_steps, dtype=np.int64), (n,)))
    ds = np.zeros(n)
    moving = counts > 0
    ds[moving] = (stop[moving] - start[moving]) / counts[moving]
    jac = np.broadcast_to(np.eye(3), (n, 3, 3)).copy() if jacobian else None

    if on_node is not None:
        on_node(0, np.arange(n), start.copy(), eta, jac)

    s = start
    for k in range(int(counts.max(initial=0))):
        idx = np.flatnonzero(k < counts)
        new_eta, new_jac = rk4_step(u, s[idx], ds[idx], eta[idx],
                                    None if jac is None else jac[idx])
        # last step lands exactly on t2
        new_s = np.where(k + 1 == counts[idx], stop[idx], start[idx] + (k + 1) * ds[idx])
        check_state(u, new_eta, new_s, margin_fraction, check_slab)
        eta[idx] = new_eta
        if jac is not None:
            jac[idx] = new_jac
        s = s.copy()
        s[idx] = new_s
        if on_node is not None:
            on_node(k + 1, idx, new_s, new_eta, new_jac)
    return eta, jac


# ---------------------------------------------------------
# PER-POINT OPERATIONS
# ---------------------------------------------------------
def integrate_flow(u: FieldProvider, t1: float, t2: float, x: ArrayLike, h: float,
                   margin_fraction: float = EXTENSION_MARGIN_FRACTION) -> FlowSample:
    """
    η(t1, t2; x) and ∇η(t1, t2; x) by RK4 (backward when t2 < t1).

    Raises:
        IntegrationDomainError: Trajectory left the extension slab.
        NumericError: Non-finite state.
    """
    seed = np.asarray(x, dtype=np.float64).reshape(3)
    eta, jac = integrate_batch(u, t1, t2, seed[None], h, margin_fraction=margin_fraction)
    return FlowSample(float(t1), float(t2), seed, eta[0], jac[0], float(h))


def group_defect(u: FieldProvider, t1: float, t2: float, t3: float, x: ArrayLike,
                 h: float) -> float:
    """|η(t2, t3; η(t1, t2; x)) - η(t1, t3; x)|."""
    mid = integrate_flow(u, t1, t2, x, h).eta
    composed = integrate_flow(u, t2, t3, mid, h).eta
    direct = integrate_flow(u, t1, t3, x, h).eta
    return float(np.linalg.norm(composed - direct))


def roundtrip_defect(u: FieldProvider, t1: float, t2: float, x: ArrayLike, h: float) -> float:
    """|η(t2, t1; η(t1, t2; x)) - x|."""
    there = integrate_flow(u, t1, t2, x, h).eta
    back = integrate_flow(u, t2, t1, there, h).eta
    return float(np.linalg.norm(back - np.asarray(x, dtype=np.float64)))


def dt1_eta(u: FieldProvider, t1: float, t2: float, x: ArrayLike, h: float,
            delta: float) -> FloatArray:
    """
    Centered difference of η(t1, t2; x) in t1. Both legs use the same step
    count, so the difference is smooth in delta.
    """
    seed = np.asarray(x, dtype=np.float64).reshape(1, 3)
    n = step_counts(abs(t2 - t1) + delta, h)
    plus, _ = integrate_batch(u, t1 + delta, t2, seed, h, jacobian=False, n_steps=n)
    minus, _ = integrate_batch(u, t1 - delta, t2, seed, h, jacobian=False, n_steps=n)
    return (plus[0] - minus[0]) / (2.0 * delta)


def self_transport_residual(u: FieldProvider, t1: float, t2: float, x: ArrayLike,
                            delta: float, h: float) -> float:
    """|∂_{t1} η(t1, t2; x) + ∇η(t1, t2; x) u(t1, x)|."""
    seed = np.asarray(x, dtype=np.float64).reshape(3)
    d_eta = dt1_eta(u, t1, t2, seed, h, delta)
    grad_eta = integrate_flow(u, t1, t2, seed, h).grad_eta
    return float(np.linalg.norm(d_eta + grad_eta @ u.eval(t1, seed)))
