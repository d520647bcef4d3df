"""
Region Classification and the T* Monitor
========================================

Grid-wide labels from the transported level set φ(t, x) = η₁(t, 0; x):

* Minus where φ > band,
* Plus where φ < -band,
* OnS (the S-band) otherwise,

with band = s_band · h. The T* monitor samples [0, T] and reports the
first time at which S(t) stops being a transversal interior hypersurface.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import brentq

from inflowlab.constants import (
    CONTAINMENT_REFINE,
    DEFAULT_FD_STEP,
    DEFAULT_S_BAND,
    TSTAR_BISECTION_STEPS,
    Region
)
from inflowlab.core.exceptions import DataError
from inflowlab.entry.tracing import default_tolerance, levelset_phi, trace_to_inflow
from inflowlab.geometry.domain import ChannelDomain, FloatArray
from inflowlab.geometry.fields import FieldProvider
from inflowlab.utils.logger import get_logger

log = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class RegionMask:
    """Region codes, φ and the S-band mask at every grid node."""
    t: float
    region: NDArray[np.int8]
    phi: FloatArray
    band: NDArray[np.bool_]
    band_width: float

    def count(self, region: Region) -> int:
        return int(np.count_nonzero(self.region == region))


def regions_from_phi(phi: FloatArray, band_width: float) -> NDArray[np.int8]:
    region = np.full(phi.shape, Region.ON_S, dtype=np.int8)
    region[phi > band_width] = Region.MINUS
    region[phi < -band_width] = Region.PLUS
    return region


def classify_grid(u: FieldProvider, t: float, domain: ChannelDomain, h: float,
                  s_band: float = DEFAULT_S_BAND) -> RegionMask:
    """Applies `levelset_phi` at all nodes and labels them."""
    phi = levelset_phi(u, t, domain.nodes(), h, check_slab=False)
    band_width = s_band * h
    region = regions_from_phi(phi, band_width)
    band = region == Region.ON_S
    if t > 0.0 and not np.any(band):
        log.warning("S-band is empty at t=%.6g; refine the grid or widen s_band", t)
    log.debug("t=%.6g: %d Plus, %d Minus, %d band nodes", t,
              int(np.count_nonzero(region == Region.PLUS)),
              int(np.count_nonzero(region == Region.MINUS)),
              int(np.count_nonzero(band)))
    return RegionMask(float(t), region, phi, band, band_width)


# ---------------------------------------------------------
# T* MONITOR
# ---------------------------------------------------------
@dataclass(frozen=True)
class Violation:
    time: float
    condition: str
    value: float


@dataclass
class TStarReport:
    """Largest admissible time, with the violations seen while sampling."""
    tstar: float
    horizon: float
    violations: list[Violation] = field(default_factory=list)

    @property
    def first_violation(self) -> float | None:
        return self.violations[0].time if self.violations else None

    @property
    def restart_needed(self) -> bool:
        return self.tstar < self.horizon


def surface_points(phi: FloatArray, domain: ChannelDomain) -> FloatArray:
    """
    Roots of φ along x1 grid lines, by linear interpolation between adjacent
    nodes of opposite sign. Returns an (m, 3) array.
    """
    lo, hi = phi[:-1], phi[1:]
    hits = np.argwhere(np.signbit(lo) != np.signbit(hi))
    if hits.size == 0:
        return np.empty((0, 3))
    i, j, k = hits.T
    a, b = lo[i, j, k], hi[i, j, k]
    frac = a / (a - b)
    x1 = domain.x1[i] + frac * domain.hx
    return np.column_stack([x1, domain.x2[j], domain.x3[k]])


def entry_time_rate(u: FieldProvider, t: float, points: FloatArray, h: float,
                    tol: float, fd_step: float) -> FloatArray:
    """
    Centered difference of τ in t at fixed points. Crossings may predate
    t = 0, so tracing runs below the initial time.
    """
    if points.shape[0] == 0:
        return np.empty(0)
    floor = -(t + fd_step + 1.0)
    _, tau_p, _ = trace_to_inflow(u, t + fd_step, points, h, tol, floor)
    _, tau_m, _ = trace_to_inflow(u, t - fd_step, points, h, tol, floor)
    rate = (tau_p - tau_m) / (2.0 * fd_step)
    return rate[np.isfinite(rate)]


def outflow_wall_points(domain: ChannelDomain, refine: int = CONTAINMENT_REFINE) -> FloatArray:
    """Points of Γ₋ on a wall grid `refine` times finer than the nodes, shape (m, 3)."""
    y = np.arange(refine * domain.Ny) * (domain.Ly / (refine * domain.Ny))
    z = np.arange(refine * domain.Nz) * (domain.Lz / (refine * domain.Nz))
    yy, zz = np.meshgrid(y, z, indexing="ij")
    return np.column_stack([np.full(yy.size, domain.Lx), yy.ravel(), zz.ravel()])


def _admissible(u: FieldProvider, t: float, domain: ChannelDomain, h: float,
                tol: float, fd_step: float) -> list[Violation]:
    # S(t) reaches Γ₋ as soon as φ stops being positive anywhere on it
    wall_phi = levelset_phi(u, t, outflow_wall_points(domain), h, check_slab=False)
    found: list[Violation] = []
    if float(np.min(wall_phi)) <= 0.0:
        found.append(Violation(float(t), "containment", float(np.min(wall_phi))))
        return found
    phi = levelset_phi(u, t, domain.nodes(), h, check_slab=False)
    rate = entry_time_rate(u, t, surface_points(phi, domain), h, tol, fd_step)
    if rate.size and np.min(rate) <= 0.0:
        found.append(Violation(float(t), "transversality", float(np.min(rate))))
    return found


def tstar_monitor(u: FieldProvider, domain: ChannelDomain, T: float, h: float,
                  samples: int = 20, fd_step: float = DEFAULT_FD_STEP,
                  tol: float | None = None) -> TStarReport:
    """
    Largest t ≤ T such that S(t) stays inside Ω (φ > 0 on a refined Γ₋ grid)
    and the entry time increases across S(t) (∂_t τ > 0 at the roots of φ).

    The horizon is sampled at `samples` equispaced times; the first violating
    sample is bracketed and refined by bisection.
    """
    tol = default_tolerance(domain.Lx) if tol is None else tol
    report = TStarReport(float(T), float(T))
    good = 0.0
    for tj in np.linspace(0.0, T, samples + 1)[1:]:
        found = _admissible(u, float(tj), domain, h, tol, fd_step)
        if not found:
            good = float(tj)
            continue
        report.violations.extend(found)
        bad = float(tj)
        for _ in range(TSTAR_BISECTION_STEPS):
            mid = 0.5 * (good + bad)
            if _admissible(u, mid, domain, h, tol, fd_step):
                bad = mid
            else:
                good = mid
        report.tstar = good
        log.warning("S(t) ceases to be admissible near t=%.6g (%s)", bad,
                    found[0].condition)
        break
    else:
        log.info("T* monitor: no violation up to T=%.6g", T)
    return report


def surface_root(u: FieldProvider, t: float, x2: float, x3: float, h: float,
                 lx: float, xtol: float = 1.0e-13) -> FloatArray:
    """
    The point of S(t) on the x1 line through (x2, x3), as the root of φ
    bracketed by the walls.

    Raises:
        DataError: φ does not change sign between the walls.
    """
    def phi_at(x1: float) -> float:
        return float(levelset_phi(u, t, np.array([x1, x2, x3]), h, check_slab=False))

    lo, hi = phi_at(0.0), phi_at(lx)
    if lo > 0.0 or hi < 0.0:
        raise DataError(f"S(t) does not cross the line through ({x2:.4g}, {x3:.4g})",
                        time=t)
    x1 = brentq(phi_at, 0.0, lx, xtol=xtol)
    return np.array([x1, x2, x3])
