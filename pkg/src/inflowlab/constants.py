"""
inflowlab Numerical Constants and Enumerations
==============================================
Default tolerances, step factors and the integer codes shared between the
solver, the dump format and the CLI.

Key Definitions:
----------------
* Region codes: the integer labels written into region-mask dumps.
* Exit codes: the process status contract of the command-line tool.
* Solver defaults: values used when a run configuration omits them.

Note:
-----
Lengths given as fractions (margin, bisection tolerance) are multiplied by
the channel length Lx; band widths are multiples of the ODE step.
"""
from enum import IntEnum
from typing import Final


class Region(IntEnum):
    """Region labels for points of the space-time cylinder."""
    MINUS = -1
    ON_S = 0
    PLUS = 1


class ExitCode(IntEnum):
    """Process exit statuses of the `inflowlab` CLI."""
    PASS = 0
    CHECK_FAILURE = 1
    CONFIG_ERROR = 2
    NUMERIC_ERROR = 3


# Grid minimums
MIN_NX: Final[int] = 8
MIN_NY: Final[int] = 4
MIN_NZ: Final[int] = 4

# Flow-map integration
DEFAULT_ODE_STEP: Final[float] = 1.0e-2
EXTENSION_MARGIN_FRACTION: Final[float] = 0.25
MAX_TRACE_STEPS: Final[int] = 10_000_000
MAX_BISECTION_ITERATIONS: Final[int] = 200

# Entry tracing and the S-band
BISECTION_TOL_FRACTION: Final[float] = 1.0e-10
DEFAULT_S_BAND: Final[float] = 2.0
STRONG_RESIDUAL_BAND: Final[float] = 3.0
TANGENCY_THRESHOLD: Final[float] = 1.0e-8
DEFAULT_FD_STEP: Final[float] = 1.0e-4

# Quadrature
MIN_QUADRATURE_NODES: Final[int] = 3
WEAK_GAUSS_NODES: Final[int] = 8
WEAK_GAUSS_PANELS: Final[int] = 2

# Restarts
MAX_RESTART_SEGMENTS: Final[int] = 16
TSTAR_BISECTION_STEPS: Final[int] = 30
CONTAINMENT_REFINE: Final[int] = 2

# Tolerances for checks and preconditions
DEFAULT_CHECK_TOL: Final[float] = 1.0e-6
SURFACE_TANGENCY_TOL: Final[float] = 1.0e-10
RANGE_TOL: Final[float] = 5.0e-2
FLUX_BALANCE_TOL: Final[float] = 1.0e-8
DIVERGENCE_TOL: Final[float] = 1.0e-6
CUT_FLUX_TOL: Final[float] = 1.0e-3
COMPAT_TOL: Final[float] = 1.0e-8
ZERO_DATA_TOL: Final[float] = 1.0e-12

# Hölder sampling
DEFAULT_HOLDER_ALPHA: Final[float] = 0.5
DEFAULT_HOLDER_PAIRS: Final[int] = 2000
HOLDER_CHUNK: Final[int] = 1024
DEFAULT_SEED: Final[int] = 20240101

# Threading
NODE_CHUNK: Final[int] = 4096
