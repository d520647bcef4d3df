"""
Transverse Mode Solves
======================

FFT in (y, z) reduces the channel's elliptic problems to one two-point
boundary-value problem in x1 per transverse mode (ky, kz). The x1 operator
is D @ D - κ² with D the wall-closed first-derivative matrix and κ² built
from the effective wavenumbers, so the per-mode solutions are consistent
with the discrete divergence and curl. Nyquist modes of even grids have a
zero derivative symbol and are not resolved by any of the solves.
"""
from __future__ import annotations

from functools import cache

import numpy as np
from numpy.typing import NDArray
import scipy.fft as sfft
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from inflowlab.core.exceptions import NumericError
from inflowlab.geometry.domain import ChannelDomain, FloatArray
from inflowlab.geometry.operators import wavenumbers, x1_derivative_matrix

type ComplexArray = np.ndarray


def to_modes(f: FloatArray) -> ComplexArray:
    """2D FFT over the last two axes (y, z)."""
    return sfft.fft2(np.asarray(f, dtype=np.float64), axes=(-2, -1))


def from_modes(f_hat: ComplexArray) -> FloatArray:
    return np.real(sfft.ifft2(f_hat, axes=(-2, -1)))


def mode_symbols(domain: ChannelDomain) -> tuple[FloatArray, FloatArray, FloatArray]:
    """(ky, kz, κ²) on the (Ny, Nz) mode grid, with Nyquist symbols zeroed."""
    ky = wavenumbers(domain.Ny, domain.Ly)[1][:, None] * np.ones((1, domain.Nz))
    kz = wavenumbers(domain.Nz, domain.Lz)[1][None, :] * np.ones((domain.Ny, 1))
    return ky, kz, ky ** 2 + kz ** 2


def nyquist_mask(domain: ChannelDomain) -> NDArray[np.bool_]:
    """True on the (Ny, Nz) modes whose y or z index is the Nyquist index of an even grid."""
    mask = np.zeros((domain.Ny, domain.Nz), dtype=bool)
    if domain.Ny % 2 == 0:
        mask[domain.Ny // 2, :] = True
    if domain.Nz % 2 == 0:
        mask[:, domain.Nz // 2] = True
    return mask


@cache
def _operator(n_intervals: int, length: float, kappa2: float, closure: str) -> sp.csc_matrix:
    d = x1_derivative_matrix(n_intervals, length)
    n = n_intervals + 1
    mat = (d @ d - kappa2 * sp.identity(n)).tolil()
    if closure == "neumann":
        mat[0, :] = d[0, :].toarray()
        mat[n - 1, :] = d[n - 1, :].toarray()
    else:
        mat[0, :] = 0.0
        mat[n - 1, :] = 0.0
        mat[0, 0] = 1.0
        mat[n - 1, n - 1] = 1.0
    return mat.tocsc()


def solve_mode(domain: ChannelDomain, kappa2: float, rhs: ComplexArray,
               lo: complex, hi: complex, closure: str = "neumann") -> ComplexArray:
    """
    Solves (D D - κ²) q = rhs on interior x1 rows with either derivative
    (`neumann`) or value (`dirichlet`) rows lo/hi on the walls.

    Raises:
        NumericError: The banded solve produced non-finite values.
    """
    mat = _operator(domain.Nx, domain.Lx, float(kappa2), closure)
    b = np.array(rhs, dtype=np.complex128, copy=True)
    b[0], b[-1] = lo, hi
    sol = spsolve(mat, np.column_stack([b.real, b.imag]))
    q = sol[:, 0] + 1j * sol[:, 1]
    if not np.all(np.isfinite(q)):
        raise NumericError(f"Mode solve broke down (κ² = {kappa2:.4g})")
    return q


def trapezoid_weights(domain: ChannelDomain) -> FloatArray:
    w = np.full(domain.Nx + 1, domain.hx)
    w[0] = w[-1] = 0.5 * domain.hx
    return w


def mean_zero_antiderivative(domain: ChannelDomain, f: ComplexArray) -> ComplexArray:
    """q with D q = f and zero trapezoid mean, in the least-squares sense."""
    d = x1_derivative_matrix(domain.Nx, domain.Lx).toarray()
    mat = np.vstack([d, trapezoid_weights(domain)[None]])
    rhs = np.concatenate([np.asarray(f, dtype=np.complex128), [0.0]])
    sol, *_ = np.linalg.lstsq(mat.astype(np.complex128), rhs, rcond=None)
    return sol
