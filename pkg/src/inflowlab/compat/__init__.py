"""
inflowlab Compatibility Package
===============================

Corner compatibility residuals on Γ₊, the range-of-curl boundary
condition, and the predicted and measured jumps of DY across S(t).
"""

__version__ = "0.1.0"

from .conditions import (
    CompatEntry,
    CompatReport,
    compat_report,
    cond0_residual,
    cond1_residual,
    cond1_vector,
    cond2_residual,
    cond2_vector,
    range_of_curl_residual
)
from .jumps import (
    JumpMeasurement,
    JumpSeries,
    jump_oracle,
    measure_jump,
    measure_jump_series,
    surface_normal
)

__all__ = [
    "CompatEntry",
    "CompatReport",
    "compat_report",
    "cond0_residual",
    "cond1_residual",
    "cond1_vector",
    "cond2_residual",
    "cond2_vector",
    "range_of_curl_residual",
    "JumpMeasurement",
    "JumpSeries",
    "jump_oracle",
    "measure_jump",
    "measure_jump_series",
    "surface_normal"
]
