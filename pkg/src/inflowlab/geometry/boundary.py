"""
Inflow Boundary Data
====================

Providers of the inflow data H on Γ₊ = {x1 = 0}. Points are passed as full
3-vectors; only their (y, z) coordinates are used.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Sequence

import numpy as np
from numpy.typing import ArrayLike
from scipy.interpolate import RegularGridInterpolator, make_interp_spline

from inflowlab.core.exceptions import CapabilityError, DataCoverageError, NumericError
from inflowlab.geometry.domain import ChannelDomain, FloatArray, Side
from inflowlab.geometry.fields import FieldProvider


class BoundaryData(ABC):
    """Abstract inflow data H(t, γ) on Γ₊."""

    @abstractmethod
    def eval(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        """Value of H, shape (..., 3)."""

    @abstractmethod
    def dt(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        """∂_t H, shape (..., 3)."""

    def dtt(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        raise CapabilityError(f"{type(self).__name__} has no second time derivative",
                              key="dtt")

    @property
    def time_range(self) -> tuple[float, float] | None:
        return None

    def on_wall(self, domain: ChannelDomain, t: float) -> FloatArray:
        """H at the Γ₊ nodes, shape (3, Ny, Nz)."""
        return np.moveaxis(self.eval(t, domain.boundary_nodes(Side.PLUS)), -1, 0)


class AnalyticBoundary(BoundaryData):
    """The trace on Γ₊ of an analytic provider."""

    def __init__(self, field: FieldProvider):
        self.field = field

    @staticmethod
    def _on_wall(x: ArrayLike) -> FloatArray:
        pts = np.array(x, dtype=np.float64, copy=True)
        pts[..., 0] = 0.0
        return pts

    def eval(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self.field.eval(t, self._on_wall(x))

    def dt(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self.field.dt(t, self._on_wall(x))

    def dtt(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self.field.dtt(t, self._on_wall(x))


class BoundaryField(BoundaryData):
    """
    Sampled inflow data: bilinear on the Γ₊ nodes, cubic spline in time.

    Args:
        domain: The channel; fixes the (y, z) node layout.
        times: Strictly increasing sample times.
        values: Samples of H, shape (n_t, 3, Ny, Nz).
        dt_values: Optional samples of ∂_t H, same shape.
        dtt_values: Optional samples of ∂_t² H, same shape.
        coverage_tol: Extrapolation allowance outside the sampled range.
    """

    def __init__(self, domain: ChannelDomain, times: Sequence[float], values: ArrayLike,
                 dt_values: ArrayLike | None = None, dtt_values: ArrayLike | None = None,
                 coverage_tol: float = 0.0):
        self.domain = domain
        self.times = np.asarray(times, dtype=np.float64)
        if self.times.ndim != 1 or self.times.size == 0:
            raise DataCoverageError("Boundary data needs at least one sample time")
        if np.any(np.diff(self.times) <= 0.0):
            raise DataCoverageError("Boundary sample times must be strictly increasing")
        self.coverage_tol = float(coverage_tol)
        self.values = self._check(values, "values")
        self.dt_values = None if dt_values is None else self._check(dt_values, "dt_values")
        self.dtt_values = None if dtt_values is None else self._check(dtt_values, "dtt_values")

    def _check(self, samples: ArrayLike, name: str) -> FloatArray:
        arr = np.asarray(samples, dtype=np.float64)
        expected = (self.times.size, 3, self.domain.Ny, self.domain.Nz)
        if arr.shape != expected:
            raise DataCoverageError(f"Boundary {name} shape {arr.shape} != {expected}", key=name)
        if not np.all(np.isfinite(arr)):
            raise NumericError(f"Boundary {name} contain non-finite entries", key=name)
        return arr

    @property
    def time_range(self) -> tuple[float, float]:
        return float(self.times[0]), float(self.times[-1])

    def _time_weights(self, t: FloatArray) -> FloatArray:
        lo = self.times[0] - self.coverage_tol
        hi = self.times[-1] + self.coverage_tol
        if t.size and (np.min(t) < lo or np.max(t) > hi):
            bad = float(np.min(t)) if np.min(t) < lo else float(np.max(t))
            raise DataCoverageError("Inflow time outside the sampled range", time=bad)
        n = self.times.size
        if n == 1:
            return np.ones((*t.shape, 1))
        basis = make_interp_spline(self.times, np.eye(n), k=min(3, n - 1))
        return basis(t)

    def _interpolate(self, samples: FloatArray, t: ArrayLike, x: ArrayLike) -> FloatArray:
        pts = self.domain.wrap(x)
        tt = np.broadcast_to(np.asarray(t, dtype=np.float64), pts.shape[:-1])
        y_pad = np.arange(self.domain.Ny + 1) * self.domain.hy
        z_pad = np.arange(self.domain.Nz + 1) * self.domain.hz
        # (n_t, 3, Ny, Nz) -> (Ny+1, Nz+1, n_t * 3) on the closed periodic grid
        grid = np.moveaxis(samples, (0, 1), (2, 3)).reshape(self.domain.Ny, self.domain.Nz, -1)
        grid = np.concatenate([grid, grid[:1]], axis=0)
        grid = np.concatenate([grid, grid[:, :1]], axis=1)
        spatial = RegularGridInterpolator((y_pad, z_pad), grid, method="linear")(pts[..., 1:])
        spatial = spatial.reshape(*pts.shape[:-1], self.times.size, 3)
        weights = self._time_weights(tt)
        return np.einsum("...j,...jc->...c", weights, spatial)

    def eval(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self._interpolate(self.values, t, x)

    def dt(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        if self.dt_values is None:
            raise DataCoverageError("Inflow data carries no ∂tH samples", key="dt_values")
        return self._interpolate(self.dt_values, t, x)

    def dtt(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        if self.dtt_values is None:
            raise CapabilityError("Inflow data carries no ∂t²H samples", key="dtt_values")
        return self._interpolate(self.dtt_values, t, x)

    @classmethod
    def sample(cls, source: BoundaryData, domain: ChannelDomain, times: Sequence[float],
               with_derivatives: bool = True, coverage_tol: float = 0.0) -> BoundaryField:
        """Samples another boundary provider on the Γ₊ nodes."""
        values = np.stack([source.on_wall(domain, t) for t in times])
        dt_values = dtt_values = None
        if with_derivatives:
            nodes = domain.boundary_nodes(Side.PLUS)
            dt_values = np.stack([np.moveaxis(source.dt(t, nodes), -1, 0) for t in times])
            try:
                dtt_values = np.stack([np.moveaxis(source.dtt(t, nodes), -1, 0)
                                       for t in times])
            except CapabilityError:
                dtt_values = None
        return cls(domain, times, values, dt_values, dtt_values, coverage_tol)


class TimeShiftedBoundary(BoundaryData):
    """H(t + shift, γ)."""

    def __init__(self, base: BoundaryData, shift: float):
        self.base = base
        self.shift = float(shift)

    def _t(self, t: ArrayLike) -> FloatArray:
        return np.asarray(t, dtype=np.float64) + self.shift

    def eval(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self.base.eval(self._t(t), x)

    def dt(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self.base.dt(self._t(t), x)

    def dtt(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        return self.base.dtt(self._t(t), x)

    @property
    def time_range(self) -> tuple[float, float] | None:
        rng = self.base.time_range
        return None if rng is None else (rng[0] - self.shift, rng[1] - self.shift)
