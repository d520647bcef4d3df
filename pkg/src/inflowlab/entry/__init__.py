"""
inflowlab Entry Package
=======================

Entry times and entry points on the inflow wall, the transported level set
that separates the Plus and Minus regions, the closed-form entry gradients
and the T* monitor used for restarts.
"""

__version__ = "0.1.0"

from .tracing import (
    EntryRecord,
    EntryBatch,
    EntryGradients,
    trace_to_inflow,
    trace_entries,
    locate_entry,
    levelset_phi,
    entry_gradients
)
from .regions import (
    RegionMask,
    TStarReport,
    Violation,
    classify_grid,
    outflow_wall_points,
    regions_from_phi,
    surface_points,
    surface_root,
    tstar_monitor
)

__all__ = [
    "EntryRecord",
    "EntryBatch",
    "EntryGradients",
    "trace_to_inflow",
    "trace_entries",
    "locate_entry",
    "levelset_phi",
    "entry_gradients",
    "RegionMask",
    "TStarReport",
    "Violation",
    "classify_grid",
    "outflow_wall_points",
    "regions_from_phi",
    "surface_points",
    "surface_root",
    "tstar_monitor"
]
