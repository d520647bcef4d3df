"""
Biot–Savart Operators
=====================

K[ω] is the unique v with curl v = ω, div v = 0, v·n = 0 on the walls and
no harmonic part; it exists iff ω is divergence free with zero external
flux through each wall. K_Un adds the harmonic gradient ∇φ (Δφ = 0,
∂φ/∂n = Uⁿ) so the result carries a prescribed normal trace.
"""
from __future__ import annotations

import numpy as np

from inflowlab.constants import FLUX_BALANCE_TOL, RANGE_TOL
from inflowlab.core.exceptions import IncompatibleFluxError, NotInRangeError
from inflowlab.curltools.hodge import external_flux
from inflowlab.curltools.spectral import (
    from_modes,
    mean_zero_antiderivative,
    mode_symbols,
    nyquist_mask,
    solve_mode,
    to_modes
)
from inflowlab.geometry.domain import FloatArray, GridVectorField, Side
from inflowlab.geometry.operators import divergence, surface_integral, x1_derivative_matrix
from inflowlab.utils.logger import get_logger

log = get_logger(__name__)


def check_range(omega: GridVectorField, tol: float = RANGE_TOL) -> None:
    """
    Raises NotInRangeError unless ω is (discretely) divergence free and has
    no external flux through either wall, relative to ‖ω‖∞.
    """
    scale = omega.sup_norm
    if scale == 0.0:
        return
    div = float(np.max(np.abs(divergence(omega))))
    if div * omega.domain.h_min > tol * scale:
        raise NotInRangeError(f"ω is not divergence free (max |div ω| = {div:.3e})",
                              key="divergence", time=omega.t)
    for side in Side:
        flux = external_flux(omega, side)
        if abs(flux) > tol * scale * omega.domain.area:
            raise NotInRangeError(f"ω has external flux {flux:.3e} through Γ {side.value}",
                                  key=f"flux.{side.value}", time=omega.t)


def biot_savart_K(omega: GridVectorField, check: bool = True) -> GridVectorField:
    """
    K[ω] by transverse modes. For κ² > 0 the normal component solves
    (D D - κ²) v̂₁ = -i(ky ω̂₃ - kz ω̂₂) with v̂₁ = 0 on the walls and the
    tangential components follow algebraically from div v = 0 and
    (curl v)₁ = ω₁. The x1-only mode is a mean-zero antiderivative and the
    unresolved Nyquist modes are zero.

    Raises:
        NotInRangeError: ω is not in the range of the curl.
    """
    if check:
        check_range(omega)
    dom = omega.domain
    w = to_modes(omega.values)
    ky, kz, k2 = mode_symbols(dom)
    nyquist = nyquist_mask(dom)
    d1 = x1_derivative_matrix(dom.Nx, dom.Lx)
    out = np.zeros_like(w)
    for j, k in np.ndindex(k2.shape):
        if nyquist[j, k]:
            continue
        if (j, k) == (0, 0):
            out[1, :, j, k] = mean_zero_antiderivative(dom, w[2, :, j, k])
            out[2, :, j, k] = -mean_zero_antiderivative(dom, w[1, :, j, k])
            continue
        a_y, a_z = ky[j, k], kz[j, k]
        rhs = -1j * (a_y * w[2, :, j, k] - a_z * w[1, :, j, k])
        v1 = solve_mode(dom, k2[j, k], rhs, 0.0, 0.0, closure="dirichlet")
        a = 1j * (d1 @ v1)
        b = -1j * w[0, :, j, k]
        out[0, :, j, k] = v1
        out[1, :, j, k] = (a_y * a - a_z * b) / k2[j, k]
        out[2, :, j, k] = (a_z * a + a_y * b) / k2[j, k]
    return omega.with_values(from_modes(out))


def harmonic_gradient(un_plus: FloatArray, un_minus: FloatArray,
                      template: GridVectorField) -> GridVectorField:
    """
    ∇φ with Δφ = 0 and ∂φ/∂n = Uⁿ on both walls, i.e. D φ = -Uⁿ₊ at x1 = 0
    and D φ = Uⁿ₋ at x1 = Lx.

    Raises:
        IncompatibleFluxError: ∫_{Γ₊} Uⁿ + ∫_{Γ₋} Uⁿ ≠ 0.
    """
    dom = template.domain
    flux_in = float(surface_integral(un_plus, dom))
    flux_out = float(surface_integral(un_minus, dom))
    if abs(flux_in + flux_out) > FLUX_BALANCE_TOL * max(1.0, abs(flux_in)):
        raise IncompatibleFluxError(f"Normal velocity does not balance: "
                                    f"{flux_in:.6g} in, {flux_out:.6g} out")
    lo_hat = -to_modes(un_plus)
    hi_hat = to_modes(un_minus)
    ky, kz, k2 = mode_symbols(dom)
    nyquist = nyquist_mask(dom)
    d1 = x1_derivative_matrix(dom.Nx, dom.Lx)
    out = np.zeros((3, dom.Nx + 1, dom.Ny, dom.Nz), dtype=np.complex128)
    for j, k in np.ndindex(k2.shape):
        if nyquist[j, k]:
            continue
        if (j, k) == (0, 0):
            out[0, :, 0, 0] = lo_hat[0, 0]
        else:
            phi = solve_mode(dom, k2[j, k], np.zeros(dom.Nx + 1), lo_hat[j, k], hi_hat[j, k])
            out[0, :, j, k] = d1 @ phi
            out[1, :, j, k] = 1j * ky[j, k] * phi
            out[2, :, j, k] = 1j * kz[j, k] * phi
    return template.with_values(from_modes(out))


def K_Un(omega: GridVectorField, un_plus: FloatArray, un_minus: FloatArray,
         check: bool = True) -> GridVectorField:
    """K[ω] + ∇φ, whose normal trace on Γ± is Uⁿ±."""
    return biot_savart_K(omega, check) + harmonic_gradient(un_plus, un_minus, omega)
