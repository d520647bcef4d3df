"""
Velocity Form
=============

Recovers a velocity v and a pressure gradient ∇π from a vorticity history
ω(t) so that

    ∂_t v + Ω(ω) u + ∇π = f,     curl v = ω,     v·n = Uⁿ,

where Ω(ω) = ∇K[ω] - (∇K[ω])ᵀ. The harmonic part of v is not determined by
ω; it evolves by

    P_Hc v(t) = P_Hc v(0) + ∫₀ᵗ P_Hc f - ∫₀ᵗ P_Hc P_H (Ω u),

integrated with cumulative Simpson over the snapshot times.
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson

from inflowlab.constants import MIN_QUADRATURE_NODES
from inflowlab.core.exceptions import DataCoverageError
from inflowlab.curltools.biot_savart import K_Un, biot_savart_K
from inflowlab.curltools.hodge import (
    gradient_part,
    harmonic_field,
    harmonic_project,
    leray_project
)
from inflowlab.geometry.domain import ChannelDomain, FloatArray, GridVectorField, Side
from inflowlab.geometry.fields import FieldProvider
from inflowlab.geometry.operators import curl_values, jacobian
from inflowlab.utils.logger import get_logger

log = get_logger(__name__)


def omega_matrix(v: GridVectorField) -> FloatArray:
    """Ω[i, k] = ∂_k v^i - ∂_i v^k, shape (3, 3, Nx+1, Ny, Nz)."""
    grad = jacobian(v, v.domain)
    return grad - np.swapaxes(grad, 0, 1)


def rotation_term(omega: GridVectorField, u: GridVectorField) -> GridVectorField:
    """Ω(ω) u, the rotational part of (u·∇)u when ω = curl u."""
    mat = omega_matrix(biot_savart_K(omega, check=False))
    return u.with_values(np.einsum("ik...,k...->i...", mat, u.values))


def wall_normal_velocity(u: FieldProvider, domain: ChannelDomain,
                         t: float) -> tuple[FloatArray, FloatArray]:
    """(Uⁿ₊, Uⁿ₋) = (-u₁ on Γ₊, u₁ on Γ₋), each of shape (Ny, Nz)."""
    inflow = u.eval(t, domain.boundary_nodes(Side.PLUS))[..., 0]
    outflow = u.eval(t, domain.boundary_nodes(Side.MINUS))[..., 0]
    return -inflow, outflow


def _require_series(times: Sequence[float], t: float) -> int:
    if len(times) < MIN_QUADRATURE_NODES:
        raise DataCoverageError(f"The velocity form needs at least {MIN_QUADRATURE_NODES} "
                                f"snapshots, got {len(times)}", key="snapshot_times")
    hits = np.flatnonzero(np.isclose(times, t, rtol=0.0, atol=1.0e-12))
    if hits.size == 0:
        raise DataCoverageError(f"t={t:.6g} is not a snapshot time", time=t)
    return int(hits[0])


def harmonic_history(u: FieldProvider, omegas: Sequence[GridVectorField], f: FieldProvider,
                     u0_harmonic: tuple[float, float]) -> FloatArray:
    """P_Hc v at every snapshot time, shape (n_snapshots, 2)."""
    times = np.array([w.t for w in omegas])
    rates = np.empty((times.size, 2))
    for i, w in enumerate(omegas):
        dom = w.domain
        u_grid = u.sample(dom, w.t)
        forcing = harmonic_project(f.sample(dom, w.t))
        rotation = harmonic_project(leray_project(rotation_term(w, u_grid)))
        rates[i] = np.subtract(forcing, rotation)
    return np.asarray(u0_harmonic) + cumulative_simpson(rates, x=times, axis=0, initial=0.0)


def Vc_harmonic(u: FieldProvider, omegas: Sequence[GridVectorField], f: FieldProvider,
                u0_harmonic: tuple[float, float], t: float) -> tuple[float, float]:
    """
    Harmonic component (c₂, c₃) of the velocity at snapshot time t.

    Raises:
        DataCoverageError: Fewer than three snapshots, or t is not one of them.
    """
    i = _require_series([w.t for w in omegas], t)
    c = harmonic_history(u, omegas, f, u0_harmonic)[i]
    return float(c[0]), float(c[1])


@dataclass(frozen=True, eq=False)
class VelocityRecovery:
    """Recovered velocity and pressure gradient at one time, with the residual."""
    t: float
    velocity: GridVectorField
    grad_pi: GridVectorField
    harmonic: tuple[float, float]
    residual: float


def recover_velocity_and_pressure(u: FieldProvider, omegas: Sequence[GridVectorField],
                                  f: FieldProvider, t: float,
                                  u0_harmonic: tuple[float, float] | None = None,
                                  check: bool = True) -> VelocityRecovery:
    """
    v(s) = K_Un[ω(s)] + (0, P_Hc v(s)) at every snapshot; ∂_t v by second-order
    differences in time; ∇π is the gradient part of f - ∂_t v - Ω u.

    Raises:
        NotInRangeError: ω(t) is not in the range of the curl.
        DataCoverageError: Too few snapshots, or t is not one of them.
    """
    times = np.array([w.t for w in omegas])
    i = _require_series(times.tolist(), t)
    dom = omegas[0].domain
    if u0_harmonic is None:
        u0_harmonic = harmonic_project(u.sample(dom, float(times[0])))
    history = harmonic_history(u, omegas, f, u0_harmonic)

    velocities = []
    for k, w in enumerate(omegas):
        un_plus, un_minus = wall_normal_velocity(u, dom, w.t)
        v = K_Un(w, un_plus, un_minus, check=check and k == i)
        velocities.append(v + harmonic_field(v, (history[k, 0], history[k, 1])))
    stack = np.stack([v.values for v in velocities])
    dv = np.gradient(stack, times, axis=0, edge_order=2)[i]

    omega_t, u_t = omegas[i], u.sample(dom, float(times[i]))
    rotation = rotation_term(omega_t, u_t)
    remainder = f.sample(dom, float(times[i])).values - dv - rotation.values
    grad_pi = gradient_part(omega_t.with_values(remainder))

    residual_field = dv + rotation.values - f.sample(dom, float(times[i])).values + grad_pi.values
    residual = float(np.max(np.abs(curl_values(residual_field, dom))))
    log.info("Velocity recovered at t=%.6g: curl residual %.3e", t, residual)
    c = (float(history[i, 0]), float(history[i, 1]))
    return VelocityRecovery(float(times[i]), velocities[i], grad_pi, c, residual)


def velocity_form_residual(recovery: VelocityRecovery) -> float:
    """sup |curl(∂_t v + Ω u - f + ∇π)| of a recovery."""
    return recovery.residual
