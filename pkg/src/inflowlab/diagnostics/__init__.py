"""
inflowlab Diagnostics Package
=============================

Verification monitors for solved fields: strong and weak PDE residuals,
divergence and external-flux histories, the Grönwall energy check, Hölder
regularity estimates and the aggregated DiagnosticsReport.
"""

__version__ = "0.1.0"

from .residuals import (
    BumpTestFunction,
    StrongResidual,
    WeakResidual,
    strong_residual,
    weak_residual
)
from .histories import (
    FluxRecord,
    GronwallResult,
    RegularityEntry,
    divergence_and_flux_history,
    gronwall_check,
    regbound_monitor,
    velocity_lipschitz
)
from .report import DiagnosticsReport, diagnose

__all__ = [
    "BumpTestFunction",
    "StrongResidual",
    "WeakResidual",
    "strong_residual",
    "weak_residual",
    "FluxRecord",
    "GronwallResult",
    "RegularityEntry",
    "divergence_and_flux_history",
    "gronwall_check",
    "regbound_monitor",
    "velocity_lipschitz",
    "DiagnosticsReport",
    "diagnose"
]
