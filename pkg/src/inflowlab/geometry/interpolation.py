"""
Tensor-Product Spline Interpolation
===================================

Cubic B-spline interpolation of grid samples: not-a-knot in x1, periodic in
y and z, and optionally a cubic spline in time across snapshots. The
coefficients are built by interpolating one axis at a time with
`make_interp_spline`, then evaluated with `NdBSpline`, so derivatives come
from the spline itself.
"""
from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from numpy.typing import ArrayLike
from scipy.interpolate import NdBSpline, make_interp_spline

from inflowlab.core.exceptions import DataCoverageError
from inflowlab.geometry.domain import ChannelDomain, FloatArray, GridVectorField

SPLINE_DEGREE = 3


def _pad_periodic(values: FloatArray, axis: int) -> FloatArray:
    """Appends the first slice along `axis` to close the period."""
    first = np.take(values, [0], axis=axis)
    return np.concatenate([values, first], axis=axis)


def _interp_axis(values: FloatArray, axis: int, coords: FloatArray, k: int,
                 periodic: bool) -> tuple[FloatArray, FloatArray]:
    moved = np.moveaxis(values, axis, 0)
    bc = "periodic" if periodic else None
    spline = make_interp_spline(coords, moved, k=k, axis=0, bc_type=bc)
    return spline.t, np.moveaxis(spline.c, 0, axis)


def build_spline(domain: ChannelDomain, samples: FloatArray,
                 times: FloatArray | None = None) -> NdBSpline:
    """
    Builds an NdBSpline over the grid.

    Args:
        samples: Node-major samples, shape (Nx+1, Ny, Nz, C) or, with `times`,
            (n_t, Nx+1, Ny, Nz, C).
        times: Strictly increasing snapshot times.
    """
    data = np.asarray(samples, dtype=np.float64)
    offset = 0 if times is None else 1
    data = _pad_periodic(data, offset + 1)
    data = _pad_periodic(data, offset + 2)

    y_pad = np.arange(domain.Ny + 1) * domain.hy
    z_pad = np.arange(domain.Nz + 1) * domain.hz
    knots: list[FloatArray] = []
    degrees: list[int] = []

    if times is not None:
        k_t = min(SPLINE_DEGREE, len(times) - 1)
        t_knots, data = _interp_axis(data, 0, np.asarray(times, dtype=np.float64),
                                     k_t, periodic=False)
        knots.append(t_knots)
        degrees.append(k_t)

    for axis, coords, periodic in ((offset, domain.x1, False),
                                   (offset + 1, y_pad, True),
                                   (offset + 2, z_pad, True)):
        ax_knots, data = _interp_axis(data, axis, coords, SPLINE_DEGREE, periodic)
        knots.append(ax_knots)
        degrees.append(SPLINE_DEGREE)

    return NdBSpline(tuple(knots), data, tuple(degrees))


class SpatialSpline:
    """
    Tricubic interpolant of a single GridVectorField.

    Points are wrapped in y, z. In x1 they are either checked against the
    closure (`strict`) or clipped, which extrapolates constantly.
    """

    def __init__(self, field: GridVectorField):
        self.domain = field.domain
        self.t = field.t
        self._spline = build_spline(field.domain, field.at_points())

    def _prepare(self, x: ArrayLike, strict: bool, tol: float) -> tuple[FloatArray, FloatArray]:
        pts = self.domain.wrap(x)
        if strict:
            self.domain.require_inside(pts, tol)
        clipped = (pts[..., 0] < 0.0) | (pts[..., 0] > self.domain.Lx)
        pts[..., 0] = np.clip(pts[..., 0], 0.0, self.domain.Lx)
        return pts, clipped

    def __call__(self, x: ArrayLike, *, strict: bool = False,
                 tol: float = 0.0) -> FloatArray:
        pts, _ = self._prepare(x, strict, tol)
        return self._spline(pts)

    def gradient(self, x: ArrayLike) -> FloatArray:
        """J[..., i, k] = ∂_k f^i; the x1 column vanishes where x1 is clipped."""
        pts, clipped = self._prepare(x, False, 0.0)
        cols = [self._spline(pts, nu=np.eye(3, dtype=int)[k]) for k in range(3)]
        jac = np.stack(cols, axis=-1)
        jac[clipped, :, 0] = 0.0
        return jac


class SpaceTimeSpline:
    """Cubic-in-time, tricubic-in-space interpolant over snapshots."""

    def __init__(self, snapshots: Sequence[GridVectorField], coverage_tol: float = 0.0):
        self.domain = snapshots[0].domain
        self.times = np.array([s.t for s in snapshots], dtype=np.float64)
        if np.any(np.diff(self.times) <= 0.0):
            raise DataCoverageError("Snapshot times must be strictly increasing")
        self.coverage_tol = coverage_tol
        stacked = np.stack([s.at_points() for s in snapshots])
        self._spline = build_spline(self.domain, stacked, self.times)

    def _prepare(self, t: ArrayLike, x: ArrayLike) -> tuple[FloatArray, FloatArray]:
        pts = self.domain.wrap(x)
        tt = np.broadcast_to(np.asarray(t, dtype=np.float64), pts.shape[:-1])
        lo, hi = self.times[0] - self.coverage_tol, self.times[-1] + self.coverage_tol
        if tt.size and (np.min(tt) < lo or np.max(tt) > hi):
            raise DataCoverageError(
                f"Sample time outside [{self.times[0]:.6g}, {self.times[-1]:.6g}]",
                time=float(np.min(tt) if np.min(tt) < lo else np.max(tt)))
        clipped = (pts[..., 0] < 0.0) | (pts[..., 0] > self.domain.Lx)
        pts[..., 0] = np.clip(pts[..., 0], 0.0, self.domain.Lx)
        return np.concatenate([tt[..., None], pts], axis=-1), clipped

    def __call__(self, t: ArrayLike, x: ArrayLike, nu: Sequence[int] = (0, 0, 0, 0)) -> FloatArray:
        xi, clipped = self._prepare(t, x)
        out = self._spline(xi, nu=np.asarray(nu, dtype=int))
        if nu[1] > 0:
            out[clipped] = 0.0
        return out

    def gradient(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        xi, clipped = self._prepare(t, x)
        cols = [self._spline(xi, nu=np.eye(4, dtype=int)[k + 1]) for k in range(3)]
        jac = np.stack(cols, axis=-1)
        jac[clipped, :, 0] = 0.0
        return jac


def interpolate(f: GridVectorField, x: ArrayLike, tol: float | None = None) -> FloatArray:
    """
    Tricubic interpolation of `f` at `x[..., 3]`.

    Raises:
        OutOfDomainError: If x1 leaves [0, Lx] by more than `tol`.
    """
    tol = 1.0e-12 * f.domain.Lx if tol is None else tol
    return SpatialSpline(f)(x, strict=True, tol=tol)
