"""
Diagnostics Report
==================

Aggregates the residual, history, jump and regularity monitors of one solved
field into a single serializable report.
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field as dc_field
from typing import Any

import numpy as np

from inflowlab.compat.jumps import JumpSeries, measure_jump_series
from inflowlab.config import DIAGNOSTICS_SCHEMA_TAG, JsonDict
from inflowlab.constants import (
    DEFAULT_HOLDER_ALPHA,
    DEFAULT_HOLDER_PAIRS,
    DEFAULT_SEED,
    MIN_QUADRATURE_NODES,
    STRONG_RESIDUAL_BAND
)
from inflowlab.diagnostics.histories import (
    FluxRecord,
    GronwallResult,
    RegularityEntry,
    divergence_and_flux_history,
    gronwall_check,
    regbound_monitor
)
from inflowlab.diagnostics.residuals import (
    BumpTestFunction,
    StrongResidual,
    WeakResidual,
    strong_residual,
    weak_residual
)
from inflowlab.transport.problem import ProblemData
from inflowlab.transport.solution import LagrangianSolver
from inflowlab.transport.solve import LagrangianField
from inflowlab.utils.logger import get_logger

log = get_logger(__name__)

type HistoryTable = tuple[list[str], list[list[float]]]


@dataclass
class DiagnosticsReport:
    """Per-snapshot monitors of one solved field."""
    times: list[float]
    strong: list[StrongResidual] = dc_field(default_factory=list)
    weak: list[tuple[BumpTestFunction, WeakResidual]] = dc_field(default_factory=list)
    fluxes: list[FluxRecord] = dc_field(default_factory=list)
    jumps: list[tuple[float, tuple[float, float, float], JumpSeries]] = \
        dc_field(default_factory=list)
    regularity: RegularityEntry | None = None
    gronwall: GronwallResult | None = None
    segments: list[dict[str, Any]] = dc_field(default_factory=list)
    notes: list[str] = dc_field(default_factory=list)

    def histories(self) -> dict[str, HistoryTable]:
        """Time-indexed tables for CSV output, keyed by history name."""
        out: dict[str, HistoryTable] = {}
        if self.fluxes:
            out["divergence"] = (["time", "divergence", "flux_plus", "flux_minus", "sup_norm"],
                                 [[r.t, r.divergence, r.flux_plus, r.flux_minus, r.sup_norm]
                                  for r in self.fluxes])
        if self.strong:
            out["strong_residual"] = (["time", "sup_minus", "sup_plus", "l2_minus", "l2_plus"],
                                      [[r.t, r.sup_minus, r.sup_plus, r.l2_minus, r.l2_plus]
                                       for r in self.strong])
        if self.gronwall is not None:
            g = self.gronwall
            out["energy"] = (["time", "energy", "bound"],
                             [[t, e, b] for t, e, b in zip(g.times, g.energies, g.bounds)])
        if self.regularity is not None:
            out["holder"] = (["time", "holder"],
                             [[t, v] for t, v in zip(self.times,
                                                     self.regularity.holder_Y_snapshots)])
        return out

    def to_dict(self) -> JsonDict:
        return {
            "schema": DIAGNOSTICS_SCHEMA_TAG,
            "times": list(self.times),
            "strong_residual": [r.to_dict() for r in self.strong],
            "weak_residual": [{"center": list(f.center), "radii": list(f.radii),
                               "direction": list(f.direction), **r.to_dict()}
                              for f, r in self.weak],
            "divergence_flux": [r.to_dict() for r in self.fluxes],
            "jumps": [{"t": t, "point": list(x), **s.to_dict()} for t, x, s in self.jumps],
            "regularity": None if self.regularity is None else self.regularity.to_dict(),
            "gronwall": None if self.gronwall is None else self.gronwall.to_dict(),
            "segments": self.segments,
            "notes": list(self.notes),
        }


def diagnose(field: LagrangianField, data: ProblemData, *,
             solver: LagrangianSolver | None = None,
             tests: Sequence[BumpTestFunction] = (),
             jump_points: Sequence[tuple[float, tuple[float, float, float]]] = (),
             jump_offsets: Sequence[float] = (),
             alpha: float = DEFAULT_HOLDER_ALPHA,
             pair_budget: int = DEFAULT_HOLDER_PAIRS,
             seed: int = DEFAULT_SEED,
             strong_band: float = STRONG_RESIDUAL_BAND,
             energy: bool = False,
             other: LagrangianField | None = None) -> DiagnosticsReport:
    """
    Runs every monitor that the inputs allow. Weak residuals and jumps use
    `solver` when given; without it weak residuals interpolate the
    snapshots and jumps are skipped.
    """
    report = DiagnosticsReport(list(field.times),
                               segments=list(field.metadata.get("segments", [])))
    if len(field) >= MIN_QUADRATURE_NODES:
        report.strong = [strong_residual(field, data, t, strong_band) for t in field.times]
    else:
        report.notes.append(f"strong residual skipped: {len(field)} snapshot(s)")

    if tests:
        source = solver if solver is not None else field.as_provider()
        report.weak = [(f, weak_residual(source, data, f, field.domain)) for f in tests]

    report.fluxes = divergence_and_flux_history(field)
    report.regularity = regbound_monitor(field, data, alpha, pair_budget, seed)

    if jump_points:
        if solver is None:
            report.notes.append("jump study skipped: no solver")
        else:
            for t, x in jump_points:
                series = measure_jump_series(solver, t, np.asarray(x), jump_offsets)
                report.jumps.append((t, tuple(float(c) for c in x), series))

    if energy or other is not None:
        report.gronwall = gronwall_check(field, data, other)

    log.info("Diagnostics assembled for %d snapshot(s)", len(field))
    return report
