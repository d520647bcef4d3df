"""
inflowlab Flow-Map Package
==========================

RK4 integration of particle trajectories and their Jacobians, plus the
group, roundtrip and self-transport consistency measures.
"""

__version__ = "0.1.0"

from .integrator import (
    FlowSample,
    integrate_flow,
    integrate_batch,
    group_defect,
    roundtrip_defect,
    self_transport_residual,
    step_counts
)

__all__ = [
    "FlowSample",
    "integrate_flow",
    "integrate_batch",
    "group_defect",
    "roundtrip_defect",
    "self_transport_residual",
    "step_counts"
]
