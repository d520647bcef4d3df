"""
inflowlab Curl Tools Package
============================

Hodge machinery on the periodic channel: the Leray projector, the harmonic
space span{e₂, e₃}, Biot–Savart operators with and without a prescribed
normal trace, external and internal fluxes, and velocity/pressure recovery
from a vorticity history.
"""

__version__ = "0.1.0"

from .spectral import from_modes, mode_symbols, nyquist_mask, solve_mode, to_modes
from .hodge import (
    HodgeDecomposition,
    external_flux,
    gradient_part,
    harmonic_project,
    internal_flux,
    leray_project
)
from .biot_savart import K_Un, biot_savart_K, check_range, harmonic_gradient
from .velocity import (
    VelocityRecovery,
    Vc_harmonic,
    omega_matrix,
    recover_velocity_and_pressure,
    rotation_term,
    velocity_form_residual,
    wall_normal_velocity
)

__all__ = [
    "from_modes",
    "mode_symbols",
    "nyquist_mask",
    "solve_mode",
    "to_modes",
    "HodgeDecomposition",
    "external_flux",
    "gradient_part",
    "harmonic_project",
    "internal_flux",
    "leray_project",
    "K_Un",
    "biot_savart_K",
    "check_range",
    "harmonic_gradient",
    "VelocityRecovery",
    "Vc_harmonic",
    "omega_matrix",
    "recover_velocity_and_pressure",
    "rotation_term",
    "velocity_form_residual",
    "wall_normal_velocity"
]
