"""
inflowlab Transport Package
===========================

The Lagrangian solution of the linear inflow/outflow transport problem:
pushforward of the initial and inflow data, Duhamel forcing integrals and
grid snapshot assembly with T* restarts.
"""

__version__ = "0.1.0"

from .problem import ProblemData, check_velocity, lie_forcing, manufacture
from .solution import (
    LagrangianSolver,
    PointSolution,
    SolverSettings,
    duhamel_G,
    lagrangian_solution,
    pushforward_inflow,
    pushforward_interior
)
from .solve import LagrangianField, evaluate_nodes, solve

__all__ = [
    "ProblemData",
    "check_velocity",
    "lie_forcing",
    "manufacture",
    "LagrangianSolver",
    "PointSolution",
    "SolverSettings",
    "duhamel_G",
    "lagrangian_solution",
    "pushforward_inflow",
    "pushforward_interior",
    "LagrangianField",
    "evaluate_nodes",
    "solve"
]
