"""
inflowlab: Lagrangian solutions of vorticity transport with inflow and outflow.

This package constructs and verifies solutions of the linearized vorticity
transport equation on a channel that is periodic in y and z, with inflow
data on x = 0 and outflow through x = Lx. It bundles the flow-map solver,
the compatibility-condition suite, the curl/Biot–Savart toolkit, the
verification diagnostics and the artifact formats behind the CLI.
"""
__version__ = "0.1.0"
__date__ = "2026-10-18"

# Import Sub-Packages to expose them at the top level
from . import core
from . import utils
from . import geometry
from . import flowmap
from . import entry
from . import transport
from . import compat
from . import curltools
from . import diagnostics
from . import storage
from . import scenarios

from .config import (
    ENCODING_TYPE,
    CONFIG_FILE_NAME,
    deep_merge,
    resolve_thread_count
)
from .constants import ExitCode, Region
from .geometry.domain import ChannelDomain, GridVectorField
from .transport.problem import ProblemData, manufacture
from .transport.solution import LagrangianSolver, SolverSettings
from .transport.solve import LagrangianField, solve


__all__ = [
    'core',
    'utils',
    'geometry',
    'flowmap',
    'entry',
    'transport',
    'compat',
    'curltools',
    'diagnostics',
    'storage',
    'scenarios',
    'ENCODING_TYPE',
    'CONFIG_FILE_NAME',
    'deep_merge',
    'resolve_thread_count',
    'ExitCode',
    'Region',
    'ChannelDomain',
    'GridVectorField',
    'ProblemData',
    'manufacture',
    'LagrangianSolver',
    'SolverSettings',
    'LagrangianField',
    'solve'
]
