"""
Channel Domain and Grid Fields
==============================

The computational domain is the periodic channel (0, Lx) x T^2: x1 is the
wall-normal coordinate, y and z are periodic. The boundary has exactly two
components, the inflow wall Γ₊ = {x1 = 0} and the outflow wall Γ₋ = {x1 = Lx}.

Grid layout:
------------
* x1 nodes: i * Lx / Nx for i = 0..Nx (both walls included).
* y, z nodes: j * Ly / Ny and k * Lz / Nz (no duplicated seam node).
* Vector fields are stored component-major, shape (3, Nx+1, Ny, Nz).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
from functools import cached_property
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from inflowlab.constants import MIN_NX, MIN_NY, MIN_NZ
from inflowlab.core.exceptions import GeometryError, NumericError, OutOfDomainError

type FloatArray = NDArray[np.float64]


class Side(StrEnum):
    """Boundary components of the channel."""
    PLUS = "plus"     # Γ₊, x1 = 0, inflow
    MINUS = "minus"   # Γ₋, x1 = Lx, outflow


@dataclass(frozen=True)
class ChannelDomain:
    """
    The periodic channel and its grid resolution.

    Raises:
        GeometryError: Non-positive lengths or grid counts below the minimums.
    """
    Lx: float = 1.0
    Ly: float = 1.0
    Lz: float = 1.0
    Nx: int = 16
    Ny: int = 8
    Nz: int = 8

    def __post_init__(self) -> None:
        for name in ("Lx", "Ly", "Lz"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0.0:
                raise GeometryError(f"Channel length must be positive, got {value}",
                                    key=name)
        for name, minimum in (("Nx", MIN_NX), ("Ny", MIN_NY), ("Nz", MIN_NZ)):
            value = getattr(self, name)
            if int(value) != value or value < minimum:
                raise GeometryError(f"Grid count must be an integer >= {minimum}, got {value}",
                                    key=name)

    # ---------------------------------------------------------
    # GRID
    # ---------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.Nx + 1, self.Ny, self.Nz)

    @property
    def hx(self) -> float:
        return self.Lx / self.Nx

    @property
    def hy(self) -> float:
        return self.Ly / self.Ny

    @property
    def hz(self) -> float:
        return self.Lz / self.Nz

    @property
    def h_min(self) -> float:
        return min(self.hx, self.hy, self.hz)

    @property
    def area(self) -> float:
        """Area of either boundary component."""
        return self.Ly * self.Lz

    @property
    def volume(self) -> float:
        return self.Lx * self.Ly * self.Lz

    @property
    def x1(self) -> FloatArray:
        return np.linspace(0.0, self.Lx, self.Nx + 1)

    @property
    def x2(self) -> FloatArray:
        return np.arange(self.Ny) * self.hy

    @property
    def x3(self) -> FloatArray:
        return np.arange(self.Nz) * self.hz

    def nodes(self) -> FloatArray:
        """All grid nodes, shape (Nx+1, Ny, Nz, 3)."""
        return np.stack(np.meshgrid(self.x1, self.x2, self.x3, indexing="ij"), axis=-1)

    def boundary_nodes(self, side: Side) -> FloatArray:
        """Nodes of one wall, shape (Ny, Nz, 3)."""
        yy, zz = np.meshgrid(self.x2, self.x3, indexing="ij")
        x1 = 0.0 if side is Side.PLUS else self.Lx
        return np.stack([np.full_like(yy, x1), yy, zz], axis=-1)

    def normal(self, side: Side) -> FloatArray:
        """Outward unit normal of a wall."""
        return np.array([-1.0, 0.0, 0.0]) if side is Side.PLUS else np.array([1.0, 0.0, 0.0])

    # ---------------------------------------------------------
    # POINTS
    # ---------------------------------------------------------
    def wrap(self, x: ArrayLike) -> FloatArray:
        """Maps the periodic coordinates of `x[..., 3]` into [0, L)."""
        pts = np.array(x, dtype=np.float64, copy=True)
        pts[..., 1] = np.mod(pts[..., 1], self.Ly)
        pts[..., 2] = np.mod(pts[..., 2], self.Lz)
        return pts

    def contains(self, x: ArrayLike, tol: float = 0.0) -> NDArray[np.bool_]:
        pts = np.asarray(x, dtype=np.float64)
        return (pts[..., 0] >= -tol) & (pts[..., 0] <= self.Lx + tol)

    def require_inside(self, x: ArrayLike, tol: float = 0.0) -> None:
        """Raises OutOfDomainError for the first point outside the closure."""
        pts = np.asarray(x, dtype=np.float64).reshape(-1, 3)
        outside = np.flatnonzero(~self.contains(pts, tol))
        if outside.size:
            point = tuple(float(c) for c in pts[outside[0]])
            raise OutOfDomainError("Point lies outside the channel closure", point=point)

    def periodic_delta(self, dx: ArrayLike) -> FloatArray:
        """Minimum-image displacement for `dx[..., 3]`."""
        d = np.array(dx, dtype=np.float64, copy=True)
        d[..., 1] -= self.Ly * np.round(d[..., 1] / self.Ly)
        d[..., 2] -= self.Lz * np.round(d[..., 2] / self.Lz)
        return d

    # ---------------------------------------------------------
    # SERIALIZATION
    # ---------------------------------------------------------
    def to_dict(self) -> dict[str, Any]:
        return {"Lx": self.Lx, "Ly": self.Ly, "Lz": self.Lz,
                "Nx": self.Nx, "Ny": self.Ny, "Nz": self.Nz}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ChannelDomain:
        return cls(Lx=float(data["Lx"]), Ly=float(data["Ly"]), Lz=float(data["Lz"]),
                   Nx=int(data["Nx"]), Ny=int(data["Ny"]), Nz=int(data["Nz"]))


@dataclass(frozen=True, eq=False)
class GridVectorField:
    """
    A 3-component field sampled on the grid at time `t`.

    `values` has shape (3, Nx+1, Ny, Nz). Non-finite entries are rejected.
    """
    domain: ChannelDomain
    values: FloatArray
    t: float = 0.0

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        expected = (3, *self.domain.shape)
        if arr.shape != expected:
            raise GeometryError(f"Field shape {arr.shape} does not match grid {expected}")
        if not np.all(np.isfinite(arr)):
            bad = tuple(int(i) for i in np.argwhere(~np.isfinite(arr))[0])
            raise NumericError("Grid field contains non-finite entries",
                               time=self.t, point=bad)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def zeros(cls, domain: ChannelDomain, t: float = 0.0) -> GridVectorField:
        return cls(domain, np.zeros((3, *domain.shape)), t)

    @classmethod
    def from_points(cls, domain: ChannelDomain, values: ArrayLike,
                    t: float = 0.0) -> GridVectorField:
        """Builds a field from node-major values of shape (Nx+1, Ny, Nz, 3)."""
        return cls(domain, np.moveaxis(np.asarray(values, dtype=np.float64), -1, 0), t)

    def component(self, i: int) -> FloatArray:
        return self.values[i]

    def at_points(self) -> FloatArray:
        """Node-major view, shape (Nx+1, Ny, Nz, 3)."""
        return np.moveaxis(self.values, 0, -1)

    @cached_property
    def sup_norm(self) -> float:
        return float(np.max(np.linalg.norm(self.values, axis=0)))

    def with_values(self, values: ArrayLike) -> GridVectorField:
        return GridVectorField(self.domain, np.asarray(values, dtype=np.float64), self.t)

    def __add__(self, other: GridVectorField) -> GridVectorField:
        return self.with_values(self.values + other.values)

    def __sub__(self, other: GridVectorField) -> GridVectorField:
        return self.with_values(self.values - other.values)

    def scaled(self, factor: float) -> GridVectorField:
        return self.with_values(factor * self.values)
