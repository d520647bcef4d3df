"""
Snapshot Assembly
=================

Evaluates the Lagrangian solution on the grid at the requested snapshot
times. When the T* monitor reports that S(t) stops being admissible before
the horizon, time is cut at T* and the problem is restarted with Y(T*) as
new initial data; segment boundaries are recorded in the field metadata.
"""
from __future__ import annotations

from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import NDArray

from inflowlab.constants import MAX_RESTART_SEGMENTS, NODE_CHUNK, Region
from inflowlab.core.exceptions import ConfigError, NumericError, StepLimitError
from inflowlab.entry.regions import tstar_monitor
from inflowlab.geometry.boundary import TimeShiftedBoundary
from inflowlab.geometry.domain import ChannelDomain, FloatArray, GridVectorField
from inflowlab.geometry.fields import GriddedField, TimeShiftedField
from inflowlab.transport.problem import ProblemData, check_velocity
from inflowlab.transport.solution import LagrangianSolver, PointSolution, SolverSettings
from inflowlab.utils.logger import get_logger

log = get_logger(__name__)


@dataclass(eq=False)
class LagrangianField:
    """Grid snapshots of Y with region masks, φ and provenance."""
    domain: ChannelDomain
    times: list[float]
    snapshots: list[GridVectorField]
    regions: list[NDArray[np.int8]]
    phis: list[FloatArray]
    metadata: dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.times)

    def index(self, t: float, tol: float = 1.0e-12) -> int:
        hits = [i for i, s in enumerate(self.times) if abs(s - t) <= tol]
        if not hits:
            raise ConfigError(f"No snapshot at t={t:.6g}", key="snapshot_times")
        return hits[0]

    def snapshot(self, t: float) -> GridVectorField:
        return self.snapshots[self.index(t)]

    def as_provider(self, coverage_tol: float = 0.0) -> GriddedField:
        return GriddedField(self.snapshots, coverage_tol)

    def region_counts(self, i: int) -> dict[str, int]:
        return {r.name: int(np.count_nonzero(self.regions[i] == r)) for r in Region}


def evaluate_nodes(solver: LagrangianSolver, t: float, domain: ChannelDomain,
                   threads: int = 1) -> PointSolution:
    """
    Solution at every grid node, split into NODE_CHUNK-sized batches. Chunk
    results are concatenated in chunk order.
    """
    pts = domain.nodes().reshape(-1, 3)
    chunks = [pts[i:i + NODE_CHUNK] for i in range(0, pts.shape[0], NODE_CHUNK)]
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda c: solver.evaluate(t, c), chunks))
    else:
        parts = [solver.evaluate(t, c) for c in chunks]
    return PointSolution(
        values=np.concatenate([p.values for p in parts]),
        pushforward=np.concatenate([p.pushforward for p in parts]),
        duhamel=np.concatenate([p.duhamel for p in parts]),
        region=np.concatenate([p.region for p in parts]),
        phi=np.concatenate([p.phi for p in parts]))


def _to_grid(domain: ChannelDomain, flat: FloatArray) -> FloatArray:
    return flat.reshape(domain.shape)


def _restart(data: ProblemData, at: float, initial: GridVectorField) -> ProblemData:
    restart_value = GridVectorField(initial.domain, initial.values, 0.0)
    return ProblemData(
        u=TimeShiftedField(data.u, at),
        Y0=GriddedField([restart_value]),
        H=TimeShiftedBoundary(data.H, at),
        g=TimeShiftedField(data.g, at),
        T=data.T - at,
        name=f"{data.name}@{at:.6g}")


def _seam_points(domain: ChannelDomain) -> FloatArray:
    """Cell midpoints, where the restart reads its initial value off the spline."""
    x1 = domain.x1[:-1] + 0.5 * domain.hx
    x2 = domain.x2 + 0.5 * domain.Ly / domain.Ny
    x3 = domain.x3 + 0.5 * domain.Lz / domain.Nz
    return np.stack(np.meshgrid(x1, x2, x3, indexing="ij"), axis=-1).reshape(-1, 3)


def solve(data: ProblemData, snapshot_times: Sequence[float], domain: ChannelDomain,
          settings: SolverSettings | None = None, *,
          threads: int = 1,
          tstar_samples: int = 20,
          monitor: bool = True) -> LagrangianField:
    """
    Evaluates Y on the grid at each snapshot time, restarting at T* when the
    monitor requires it.

    Raises:
        ConfigError: Snapshot times are not increasing inside [0, T].
        SignConditionError: The velocity violates the sign condition.
        NumericError: T* collapses to zero.
        StepLimitError: More than MAX_RESTART_SEGMENTS segments are needed.
    """
    settings = settings or SolverSettings()
    times = [float(t) for t in snapshot_times]
    if not times or any(b <= a for a, b in zip(times, times[1:])):
        raise ConfigError("Snapshot times must be non-empty and strictly increasing",
                          key="time.snapshot_times")
    if times[0] < 0.0 or times[-1] > data.T + 1.0e-12:
        raise ConfigError(f"Snapshot times must lie in [0, {data.T}]", key="time.snapshot_times")
    check_velocity(data.u, domain, times)

    h = settings.ode_step
    result = LagrangianField(domain, [], [], [], [])
    segments: list[dict[str, Any]] = []
    origin = 0.0
    current = data
    pending = list(times)
    while True:
        seg_end = data.T
        report = None
        if monitor:
            report = tstar_monitor(current.u, domain, data.T - origin, h, tstar_samples,
                                   settings.fd_step, settings.tolerance(domain))
            if report.tstar <= 0.0:
                raise NumericError("T* monitor found no admissible interval", time=origin)
            if report.restart_needed:
                seg_end = origin + report.tstar
        solver = LagrangianSolver(current, domain, settings)
        segment: dict[str, Any] = {"start": origin, "end": seg_end}
        if report is not None and report.violations:
            segment["violations"] = [{"time": origin + v.time, "condition": v.condition,
                                      "value": v.value} for v in report.violations]
        log.info("Segment %d: [%.6g, %.6g]", len(segments), origin, seg_end)

        while pending and pending[0] <= seg_end + 1.0e-12:
            t = pending.pop(0)
            sol = evaluate_nodes(solver, t - origin, domain, threads)
            result.times.append(t)
            result.snapshots.append(GridVectorField.from_points(
                domain, sol.values.reshape(*domain.shape, 3), t))
            result.regions.append(_to_grid(domain, sol.region))
            result.phis.append(_to_grid(domain, sol.phi))
            log.debug("Snapshot t=%.6g assembled", t)
        segments.append(segment)

        if seg_end >= data.T or not pending:
            break
        if len(segments) >= MAX_RESTART_SEGMENTS:
            raise StepLimitError(f"More than {MAX_RESTART_SEGMENTS} restart segments needed",
                                 time=seg_end)

        log.warning("Restarting at T*=%.6g", seg_end)
        seam = evaluate_nodes(solver, seg_end - origin, domain, threads)
        seam_field = GridVectorField.from_points(domain, seam.values.reshape(*domain.shape, 3),
                                                 seg_end)
        restarted = _restart(data, seg_end, seam_field)
        # both sides at T* itself; the closing segment is not evaluated past its end
        mids = _seam_points(domain)
        before = solver.evaluate(seg_end - origin, mids).values
        after = LagrangianSolver(restarted, domain, settings).evaluate(0.0, mids).values
        segment["seam_jump"] = float(np.max(np.abs(before - after)))
        origin = seg_end
        current = restarted

    result.metadata = {
        "segments": segments,
        "ode_step": h,
        "s_band": settings.s_band,
        "bisection_tol": settings.tolerance(domain),
        "quadrature_order": settings.quadrature_order,
        "threads": threads,
    }
    log.info("Solved %s: %d snapshots in %d segment(s)", data.name, len(result.times),
             len(segments))
    return result
