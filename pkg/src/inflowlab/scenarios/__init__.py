"""
inflowlab Scenarios Package
===========================

Run configuration (JSON schema, defaults, overrides) and the named scenario
presets used by the CLI, including the Euler-type velocity-form scenario.
"""

__version__ = "0.1.0"

from .presets import (
    MANUFACTURED_Y,
    PRESETS,
    EulerScenario,
    Preset,
    build_problem,
    euler_scenario,
    forcing_velocity,
    scenario_constants
)
from .runconfig import (
    DEFAULTS,
    SCHEMA,
    RunConfig,
    apply_override,
    load_config,
    parse_config,
    validate_document
)

__all__ = [
    "MANUFACTURED_Y",
    "PRESETS",
    "EulerScenario",
    "Preset",
    "build_problem",
    "euler_scenario",
    "forcing_velocity",
    "scenario_constants",
    "DEFAULTS",
    "SCHEMA",
    "RunConfig",
    "apply_override",
    "load_config",
    "parse_config",
    "validate_document"
]
