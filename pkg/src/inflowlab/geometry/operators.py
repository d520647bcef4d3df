"""
Discrete Differential Operators
===============================

Second-order finite differences in x1 (centered inside, one-sided at the
walls) combined with spectral derivatives in the periodic directions. The
three partial derivatives act on different axes and therefore commute, so
`divergence(curl(f))` and `curl(grad(q))` vanish to round-off.

All operators accept arrays whose last three axes are (x1, y, z); leading
axes (components, snapshots) are carried through unchanged.
"""
from __future__ import annotations

from functools import cache

import numpy as np
import scipy.fft as sfft
import scipy.sparse as sp
from scipy.integrate import trapezoid

from inflowlab.constants import SURFACE_TANGENCY_TOL
from inflowlab.core.exceptions import GeometryError
from inflowlab.geometry.domain import ChannelDomain, FloatArray, GridVectorField


# ---------------------------------------------------------
# STENCILS AND WAVENUMBERS
# ---------------------------------------------------------
@cache
def x1_derivative_matrix(n_intervals: int, length: float) -> sp.csr_matrix:
    """
    First-derivative matrix on the x1 nodes: centered rows inside and the
    one-sided (-3, 4, -1)/(2h) closures on both walls.
    """
    n = n_intervals + 1
    h = length / n_intervals
    mat = sp.diags([-0.5, 0.5], [-1, 1], shape=(n, n), format="lil")
    mat[0, :3] = [-1.5, 2.0, -0.5]
    mat[n - 1, n - 3:] = [0.5, -2.0, 1.5]
    return (mat / h).tocsr()


@cache
def wavenumbers(n: int, length: float) -> tuple[FloatArray, FloatArray]:
    """
    Angular wavenumbers of an n-point periodic grid.

    Returns:
        (k, k_eff): the FFT wavenumbers and the first-derivative symbol, which
        zeroes the Nyquist mode for even n.
    """
    k = 2.0 * np.pi * sfft.fftfreq(n, d=length / n)
    k_eff = k.copy()
    if n % 2 == 0:
        k_eff[n // 2] = 0.0
    k.setflags(write=False)
    k_eff.setflags(write=False)
    return k, k_eff


# ---------------------------------------------------------
# PARTIAL DERIVATIVES
# ---------------------------------------------------------
def d_dx1(f: FloatArray, domain: ChannelDomain) -> FloatArray:
    """∂/∂x1 along axis -3."""
    mat = x1_derivative_matrix(domain.Nx, domain.Lx)
    moved = np.moveaxis(np.asarray(f), -3, 0)
    out = mat @ moved.reshape(moved.shape[0], -1)
    return np.moveaxis(np.asarray(out).reshape(moved.shape), 0, -3)


def _spectral(f: FloatArray, axis: int, symbol: FloatArray) -> FloatArray:
    shape = [1] * np.ndim(f)
    shape[axis] = symbol.size
    spec = sfft.fft(f, axis=axis) * (1j * symbol).reshape(shape)
    return np.real(sfft.ifft(spec, axis=axis))


def d_dy(f: FloatArray, domain: ChannelDomain) -> FloatArray:
    """∂/∂y along axis -2."""
    return _spectral(np.asarray(f, dtype=np.float64), -2, wavenumbers(domain.Ny, domain.Ly)[1])


def d_dz(f: FloatArray, domain: ChannelDomain) -> FloatArray:
    """∂/∂z along axis -1."""
    return _spectral(np.asarray(f, dtype=np.float64), -1, wavenumbers(domain.Nz, domain.Lz)[1])


def _values(f: GridVectorField | FloatArray) -> FloatArray:
    return f.values if isinstance(f, GridVectorField) else np.asarray(f, dtype=np.float64)


def gradient(q: FloatArray, domain: ChannelDomain) -> FloatArray:
    """Gradient of a scalar grid field, shape (3, Nx+1, Ny, Nz)."""
    return np.stack([d_dx1(q, domain), d_dy(q, domain), d_dz(q, domain)], axis=0)


def jacobian(f: GridVectorField | FloatArray, domain: ChannelDomain) -> FloatArray:
    """Matrix J[i, k] = ∂_k f^i, shape (3, 3, Nx+1, Ny, Nz)."""
    v = _values(f)
    return np.stack([d_dx1(v, domain), d_dy(v, domain), d_dz(v, domain)], axis=1)


def divergence(f: GridVectorField | FloatArray, domain: ChannelDomain | None = None) -> FloatArray:
    """Scalar divergence of a vector grid field."""
    if domain is None:
        if not isinstance(f, GridVectorField):
            raise GeometryError("A domain is required for raw arrays")
        domain = f.domain
    v = _values(f)
    return d_dx1(v[0], domain) + d_dy(v[1], domain) + d_dz(v[2], domain)


def curl(f: GridVectorField) -> GridVectorField:
    """Discrete curl with the same stencils as `divergence`."""
    v, dom = f.values, f.domain
    out = np.stack([
        d_dy(v[2], dom) - d_dz(v[1], dom),
        d_dz(v[0], dom) - d_dx1(v[2], dom),
        d_dx1(v[1], dom) - d_dy(v[0], dom),
    ])
    return f.with_values(out)


def curl_values(v: FloatArray, domain: ChannelDomain) -> FloatArray:
    """Curl of a raw (3, Nx+1, Ny, Nz) array."""
    return curl(GridVectorField(domain, v)).values


# ---------------------------------------------------------
# SURFACE CALCULUS ON THE FLAT WALLS
# ---------------------------------------------------------
def surface_divergence(w: FloatArray, domain: ChannelDomain,
                       tol: float = SURFACE_TANGENCY_TOL) -> FloatArray:
    """
    Surface divergence ∂_y w₂ + ∂_z w₃ of a tangential wall field.

    Args:
        w: Wall field of shape (3, Ny, Nz).
        tol: Relative bound on the normal component.

    Raises:
        GeometryError: If |w₁| exceeds the tangency tolerance.
    """
    w = np.asarray(w, dtype=np.float64)
    scale = max(1.0, float(np.max(np.abs(w))))
    normal = float(np.max(np.abs(w[0])))
    if normal > tol * scale:
        raise GeometryError(f"Wall field is not tangential: |w·n| = {normal:.3e}")
    return d_dy(w[1], domain) + d_dz(w[2], domain)


def surface_gradient(f: FloatArray, domain: ChannelDomain) -> FloatArray:
    """Tangential gradient (0, ∂_y f, ∂_z f) of a wall scalar of shape (Ny, Nz)."""
    f = np.asarray(f, dtype=np.float64)
    return np.stack([np.zeros_like(f), d_dy(f, domain), d_dz(f, domain)])


def surface_integral(s: FloatArray, domain: ChannelDomain) -> FloatArray | float:
    """Periodic trapezoid rule over a wall; the last two axes are (y, z)."""
    return np.mean(np.asarray(s, dtype=np.float64), axis=(-2, -1)) * domain.area


# ---------------------------------------------------------
# VOLUME QUADRATURE
# ---------------------------------------------------------
def volume_integral(f: FloatArray, domain: ChannelDomain) -> FloatArray | float:
    """Trapezoid in x1 times the periodic mean in y, z."""
    profile = np.mean(np.asarray(f, dtype=np.float64), axis=(-2, -1))
    return trapezoid(profile, dx=domain.hx, axis=-1) * domain.area


def volume_mean(f: FloatArray, domain: ChannelDomain) -> FloatArray | float:
    return volume_integral(f, domain) / domain.volume


def l2_norm(f: GridVectorField | FloatArray, domain: ChannelDomain) -> float:
    v = _values(f)
    return float(np.sqrt(max(volume_integral(np.sum(v * v, axis=0), domain), 0.0)))
