"""
Hodge Decomposition on the Channel
==================================

L² vector fields on the channel split as

    v = curl part (div-free, tangent, zero harmonic part)
      + ∇q (q mean-zero)
      + harmonic part (0, c₂, c₃),

where the harmonic space of the channel is spanned by e₂ and e₃, the two
periodic handles. The Leray projector removes ∇q, with Δq = div v in Ω
and ∂q/∂n = v·n on the walls.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from inflowlab.constants import CUT_FLUX_TOL
from inflowlab.core.exceptions import NotInRangeError
from inflowlab.curltools.spectral import (
    from_modes,
    mode_symbols,
    nyquist_mask,
    solve_mode,
    to_modes
)
from inflowlab.geometry.domain import FloatArray, GridVectorField, Side
from inflowlab.geometry.operators import divergence, volume_mean, x1_derivative_matrix
from inflowlab.utils.logger import get_logger

log = get_logger(__name__)


def gradient_part(v: GridVectorField) -> GridVectorField:
    """
    ∇q with Δq = div v and ∂q/∂n = v·n, by one Neumann solve per mode.
    Unresolved Nyquist modes are assigned to the gradient part whole, so the
    Leray projection carries none.
    """
    dom = v.domain
    div_hat = to_modes(divergence(v))
    v_hat = to_modes(v.values)
    ky, kz, k2 = mode_symbols(dom)
    nyquist = nyquist_mask(dom)
    d1 = x1_derivative_matrix(dom.Nx, dom.Lx)
    out = np.zeros((3, *div_hat.shape), dtype=np.complex128)
    for j, k in np.ndindex(k2.shape):
        if nyquist[j, k]:
            out[:, :, j, k] = v_hat[:, :, j, k]
            continue
        if (j, k) == (0, 0):
            # x1-only mode: the whole normal component is a gradient
            out[0, :, j, k] = v_hat[0, :, j, k]
            continue
        q = solve_mode(dom, k2[j, k], div_hat[:, j, k], v_hat[0, 0, j, k], v_hat[0, -1, j, k])
        out[0, :, j, k] = d1 @ q
        out[1, :, j, k] = 1j * ky[j, k] * q
        out[2, :, j, k] = 1j * kz[j, k] * q
    return v.with_values(from_modes(out))


def leray_project(v: GridVectorField) -> GridVectorField:
    """P_H v = v - ∇q: divergence-free at interior nodes, tangent on the walls."""
    return v - gradient_part(v)


def harmonic_project(v: GridVectorField) -> tuple[float, float]:
    """(c₂, c₃) = volume means of the tangential components."""
    return (float(volume_mean(v.values[1], v.domain)),
            float(volume_mean(v.values[2], v.domain)))


def harmonic_field(v: GridVectorField, c: tuple[float, float]) -> GridVectorField:
    values = np.zeros_like(v.values)
    values[1], values[2] = c
    return v.with_values(values)


@dataclass(frozen=True, eq=False)
class HodgeDecomposition:
    """v = curl_part + gradient_part + harmonic_part."""
    field: GridVectorField
    curl_part: GridVectorField
    gradient_part: GridVectorField
    harmonic_part: GridVectorField

    @classmethod
    def of(cls, v: GridVectorField) -> HodgeDecomposition:
        grad = gradient_part(v)
        solenoidal = v - grad
        harmonic = harmonic_field(v, harmonic_project(solenoidal))
        return cls(v, solenoidal - harmonic, grad, harmonic)

    def reconstruction_error(self) -> float:
        total = self.curl_part + self.gradient_part + self.harmonic_part
        return (total - self.field).sup_norm


# ---------------------------------------------------------
# FLUXES
# ---------------------------------------------------------
def external_flux(omega: GridVectorField, side: Side) -> float:
    """∫ ω·n over Γ₊ (n = -e₁) or Γ₋ (n = +e₁)."""
    wall = omega.values[0, 0] if side is Side.PLUS else omega.values[0, -1]
    sign = -1.0 if side is Side.PLUS else 1.0
    return sign * float(np.mean(wall)) * omega.domain.area


def _cut_profile(component: FloatArray, axis: int, width: float, hx: float) -> FloatArray:
    """∫∫ over one cut surface for every cut position along `axis`."""
    line = np.mean(component, axis=axis) * width
    return trapezoid(line, dx=hx, axis=0)


def internal_flux(v: GridVectorField, tol: float = CUT_FLUX_TOL) -> tuple[float, float]:
    """
    Fluxes (Φ_y, Φ_z) of v through the cuts {y = 0} and {z = 0}.

    Raises:
        NotInRangeError: The flux depends on the cut position beyond `tol`,
            which means v is not divergence-free and tangent.
    """
    dom = v.domain
    phi_y = _cut_profile(v.values[1], 2, dom.Lz, dom.hx)
    phi_z = _cut_profile(v.values[2], 1, dom.Ly, dom.hx)
    scale = max(1.0, v.sup_norm * dom.Lx * max(dom.Ly, dom.Lz))
    for name, profile in (("y", phi_y), ("z", phi_z)):
        spread = float(np.max(profile) - np.min(profile))
        if spread > tol * scale:
            raise NotInRangeError(f"Flux through the {name}-cuts varies by {spread:.3e}",
                                  key=f"internal_flux.{name}")
    return float(phi_y[0]), float(phi_z[0])
