"""
Snapshot Histories
==================

Per-snapshot monitors of a solved field: divergence and external fluxes
(range-of-curl preservation), the L² energy against its Grönwall bound,
and Hölder seminorm estimates reported next to the sizes of the data.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field as dc_field

import numpy as np

from inflowlab.config import JsonDict
from inflowlab.constants import (
    DEFAULT_CHECK_TOL,
    DEFAULT_HOLDER_ALPHA,
    DEFAULT_HOLDER_PAIRS,
    DEFAULT_ODE_STEP,
    DEFAULT_S_BAND,
    DEFAULT_SEED,
    ZERO_DATA_TOL
)
from inflowlab.core.exceptions import DataCoverageError
from inflowlab.curltools.hodge import external_flux
from inflowlab.geometry.domain import ChannelDomain, FloatArray, Side
from inflowlab.geometry.fields import FieldProvider
from inflowlab.geometry.holder import holder_seminorm
from inflowlab.geometry.operators import divergence, l2_norm
from inflowlab.transport.problem import ProblemData
from inflowlab.transport.solve import LagrangianField
from inflowlab.utils.logger import get_logger

log = get_logger(__name__)


# ---------------------------------------------------------
# DIVERGENCE AND FLUXES
# ---------------------------------------------------------
@dataclass(frozen=True)
class FluxRecord:
    """‖div Y‖∞ off the S-band and Φ_{Γ±}(Y) at one snapshot."""
    t: float
    divergence: float
    flux_plus: float
    flux_minus: float
    sup_norm: float

    def to_dict(self) -> JsonDict:
        return asdict(self)


def divergence_and_flux_history(field: LagrangianField,
                                band: float | None = None) -> list[FluxRecord]:
    """
    One FluxRecord per snapshot. Nodes with |φ| within `band` ODE steps
    (the solver's S-band by default) are left out of the divergence.
    """
    h = float(field.metadata.get("ode_step", DEFAULT_ODE_STEP))
    band = float(field.metadata.get("s_band", DEFAULT_S_BAND)) if band is None else band
    records = []
    for snap, phi in zip(field.snapshots, field.phis):
        div = np.abs(divergence(snap))
        off_band = np.abs(phi) > band * h
        records.append(FluxRecord(
            t=snap.t,
            divergence=float(np.max(div[off_band], initial=0.0)),
            flux_plus=external_flux(snap, Side.PLUS),
            flux_minus=external_flux(snap, Side.MINUS),
            sup_norm=snap.sup_norm))
    if records:
        log.info("Divergence history: max %.3e over %d snapshots",
                 max(r.divergence for r in records), len(records))
    return records


# ---------------------------------------------------------
# ENERGY
# ---------------------------------------------------------
@dataclass(frozen=True)
class GronwallResult:
    """
    Energy history E(t) = ‖Y(t)‖²_{L²} (or of the difference of two runs)
    against E(0)·exp(2 L t) + floor with L = sup ‖∇u‖₂.
    """
    mode: str
    times: list[float]
    energies: list[float]
    bounds: list[float]
    growth_factors: list[float]
    lipschitz: float
    passed: bool
    notes: list[str] = dc_field(default_factory=list)

    def to_dict(self) -> JsonDict:
        return asdict(self)


def velocity_lipschitz(u: FieldProvider, domain: ChannelDomain, times: list[float]) -> float:
    """sup over the snapshot times and nodes of the spectral norm of ∇u."""
    nodes = domain.nodes()
    best = 0.0
    for t in times:
        grad = u.grad(t, nodes)
        best = max(best, float(np.max(np.linalg.norm(grad, ord=2, axis=(-2, -1)))))
    return best


def gronwall_check(field: LagrangianField, data: ProblemData,
                   other: LagrangianField | None = None,
                   tol: float = DEFAULT_CHECK_TOL) -> GronwallResult:
    """
    Single-run mode expects zero data and bounds ‖Y(t)‖ by
    ZERO_DATA_TOL·|Ω|^{1/2} on top of the Grönwall growth. Difference mode
    compares two runs of the same data and passes when their L² distance
    stays within `tol` at every snapshot.

    Raises:
        DataCoverageError: The two runs do not share snapshot times.
    """
    dom = field.domain
    times = list(field.times)
    if other is not None:
        if len(other.times) != len(times) or not np.allclose(other.times, times,
                                                             rtol=0.0, atol=1.0e-12):
            raise DataCoverageError("Runs compared for uniqueness must share snapshot times",
                                    key="snapshot_times")
        snaps = [a - b for a, b in zip(field.snapshots, other.snapshots)]
        mode = "difference"
    else:
        snaps = list(field.snapshots)
        mode = "zero-data"

    lip = velocity_lipschitz(data.u, dom, times)
    norms = np.array([l2_norm(s, dom) for s in snaps])
    energies = norms ** 2
    floor = (ZERO_DATA_TOL * np.sqrt(dom.volume)) ** 2
    t_arr = np.asarray(times)
    bounds = energies[0] * np.exp(2.0 * lip * (t_arr - t_arr[0])) + floor

    growth = []
    for k in range(1, len(times)):
        growth.append(float(energies[k] / energies[k - 1]) if energies[k - 1] > 0.0 else 1.0)

    notes = []
    if mode == "difference":
        passed = bool(np.all(norms <= tol))
        notes.append(f"max L2 difference {float(np.max(norms, initial=0.0)):.3e}")
    else:
        passed = bool(np.all(energies <= bounds * (1.0 + tol)))
        limits = np.exp(2.0 * lip * np.diff(t_arr)) * (1.0 + tol)
        if growth and np.any(np.asarray(growth) > limits):
            notes.append("energy grew faster than exp(2 L Δt) between snapshots")
    log.info("Grönwall check (%s): %s", mode, "pass" if passed else "fail")
    return GronwallResult(mode, times, energies.tolist(), bounds.tolist(), growth,
                          lip, passed, notes)


# ---------------------------------------------------------
# REGULARITY
# ---------------------------------------------------------
@dataclass(frozen=True)
class RegularityEntry:
    """Hölder seminorm estimates of Y next to the sizes of (u, H, g)."""
    alpha: float
    pair_budget: int
    seed: int
    holder_Y: float
    holder_Y_snapshots: list[float]
    holder_u: float
    sup_u: float
    sup_H: float
    sup_g: float

    @property
    def ratio(self) -> float:
        """[Y]_α over the largest data size; only its trend under refinement matters."""
        scale = max(self.holder_u, self.sup_u, self.sup_H, self.sup_g)
        return self.holder_Y / scale if scale > 0.0 else 0.0

    def to_dict(self) -> JsonDict:
        out = asdict(self)
        out["ratio"] = self.ratio
        return out


def _sampled(provider: FieldProvider, domain: ChannelDomain, times: list[float]) -> FloatArray:
    return np.stack([provider.sample(domain, t).values for t in times])


def regbound_monitor(field: LagrangianField, data: ProblemData,
                     alpha: float = DEFAULT_HOLDER_ALPHA,
                     pair_budget: int = DEFAULT_HOLDER_PAIRS,
                     seed: int = DEFAULT_SEED) -> RegularityEntry:
    """Hölder estimates of Y over space-time and per snapshot, with data sizes."""
    dom = field.domain
    times = list(field.times)
    stack = np.stack([s.values for s in field.snapshots])
    holder_y = holder_seminorm(stack, dom, alpha, pair_budget, seed, times=times)
    per_snapshot = [holder_seminorm(s.values, dom, alpha, pair_budget, seed)
                    for s in field.snapshots]

    u_stack = _sampled(data.u, dom, times)
    g_stack = _sampled(data.g, dom, times)
    walls = np.stack([data.H.on_wall(dom, t) for t in times])
    entry = RegularityEntry(
        alpha=alpha,
        pair_budget=pair_budget,
        seed=seed,
        holder_Y=holder_y,
        holder_Y_snapshots=per_snapshot,
        holder_u=holder_seminorm(u_stack, dom, alpha, pair_budget, seed, times=times),
        sup_u=float(np.max(np.linalg.norm(u_stack, axis=1))),
        sup_H=float(np.max(np.linalg.norm(walls, axis=1))),
        sup_g=float(np.max(np.linalg.norm(g_stack, axis=1))))
    log.info("Hölder estimate [Y]_%.2g = %.4g (ratio %.4g)", alpha, holder_y, entry.ratio)
    return entry
