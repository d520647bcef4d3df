"""
Scenario Presets
================

Named problem families on the channel. Each preset declares its parameters
with defaults and builds ProblemData from expression sources, with the
channel lengths Lx, Ly, Lz and the preset parameters bound as constants.

Presets:
--------
* uniform: u = (U, 0, 0), Y₀ = H = (1, 0, 0), g = 0.
* shear: u = (U, κ x, 0), Y₀ = (1, 0, 0), H = (1 + t, 0, 0). The data
  satisfy cond₀ but not cond₁, so DY jumps across S.
* swirl: u = (U + b sin(2πz/Lz), A cos(2πz/Lz), A sin(2πy/Ly)) with
  Y₀ = H = (1, 0, 0); S(t) is curved.
* manufactured: shear flow with a divergence-free Y_exact whose wall fluxes
  vanish; all compatibility conditions hold.
* zero: uniform flow with zero data.
* mismatch: uniform flow with H = (1 + jump, 0, 0), violating cond₀.
* custom-expressions: velocity and data given as expressions.
"""
from __future__ import annotations

from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any, Final

from inflowlab.core.exceptions import ConfigError
from inflowlab.geometry.boundary import AnalyticBoundary
from inflowlab.geometry.fields import ExpressionField, ZeroField
from inflowlab.transport.problem import ProblemData, manufacture
from inflowlab.utils.logger import get_logger

log = get_logger(__name__)

type Sources = Sequence[str | float]
type Builder = Callable[[Mapping[str, float], float, Mapping[str, Any]], ProblemData]

MANUFACTURED_Y: Final[tuple[str, str, str]] = (
    "0.5 * sin(2 * pi * y / Ly) * cos(t)",
    "0.3 * sin(2 * pi * z / Lz) * (1 + t)",
    "0.2 * cos(2 * pi * x / Lx) * (1 + t)",
)


def _field(sources: Sources, constants: Mapping[str, float]) -> ExpressionField:
    return ExpressionField.parse(list(sources), constants)


def _problem(constants: Mapping[str, float], T: float, name: str, velocity: Sources,
             Y0: Sources, H: Sources, g: Sources | None = None) -> ProblemData:
    u = _field(velocity, constants)
    forcing = ZeroField() if g is None else _field(g, constants)
    return ProblemData(u=u, Y0=_field(Y0, constants),
                       H=AnalyticBoundary(_field(H, constants)), g=forcing, T=T, name=name)


def _uniform(c: Mapping[str, float], T: float, _: Mapping[str, Any]) -> ProblemData:
    return _problem(c, T, "uniform", ["U", 0, 0], [1, 0, 0], [1, 0, 0])


def _shear(c: Mapping[str, float], T: float, _: Mapping[str, Any]) -> ProblemData:
    return _problem(c, T, "shear", ["U", "kappa * x", 0], [1, 0, 0], ["1 + t", 0, 0])


def _swirl(c: Mapping[str, float], T: float, _: Mapping[str, Any]) -> ProblemData:
    velocity = ["U + b * sin(2 * pi * z / Lz)", "A * cos(2 * pi * z / Lz)",
                "A * sin(2 * pi * y / Ly)"]
    return _problem(c, T, "swirl", velocity, [1, 0, 0], [1, 0, 0])


def _manufactured(c: Mapping[str, float], T: float, _: Mapping[str, Any]) -> ProblemData:
    u = _field(["U", "kappa * x", 0], c)
    return manufacture(u, _field(MANUFACTURED_Y, c), T, name="manufactured")


def _zero(c: Mapping[str, float], T: float, _: Mapping[str, Any]) -> ProblemData:
    return _problem(c, T, "zero", ["U", 0, 0], [0, 0, 0], [0, 0, 0])


def _mismatch(c: Mapping[str, float], T: float, _: Mapping[str, Any]) -> ProblemData:
    return _problem(c, T, "mismatch", ["U", 0, 0], [1, 0, 0], ["1 + jump", 0, 0])


def _custom(c: Mapping[str, float], T: float, scenario: Mapping[str, Any]) -> ProblemData:
    velocity = scenario.get("velocity")
    data = scenario.get("data") or {}
    if velocity is None:
        raise ConfigError("custom-expressions needs a velocity", key="scenario.velocity")
    if "Y_exact" in data:
        if any(k in data for k in ("Y0", "H", "g")):
            raise ConfigError("Give either Y_exact or Y0/H/g, not both", key="scenario.data")
        return manufacture(_field(velocity, c), _field(data["Y_exact"], c), T,
                           name="custom-expressions")
    missing = [k for k in ("Y0", "H") if k not in data]
    if missing:
        raise ConfigError(f"custom-expressions data lacks {', '.join(missing)}",
                          key="scenario.data")
    return _problem(c, T, "custom-expressions", velocity, data["Y0"], data["H"], data.get("g"))


@dataclass(frozen=True)
class Preset:
    """A named scenario family and its parameter defaults."""
    name: str
    defaults: Mapping[str, float]
    builder: Builder
    description: str = ""


PRESETS: Final[dict[str, Preset]] = {p.name: p for p in (
    Preset("uniform", {"U": 1.0}, _uniform, "uniform translation, seamless data"),
    Preset("shear", {"U": 1.0, "kappa": 0.5}, _shear, "linear shear, cond0 holds, cond1 fails"),
    Preset("swirl", {"U": 1.0, "A": 0.3, "b": 0.2}, _swirl, "transverse swirl, curved S"),
    Preset("manufactured", {"U": 1.0, "kappa": 0.5}, _manufactured,
           "shear flow with a known smooth solution"),
    Preset("zero", {"U": 1.0}, _zero, "zero data on uniform flow"),
    Preset("mismatch", {"U": 1.0, "jump": 1.0}, _mismatch, "cond0-violating inflow"),
    Preset("custom-expressions", {}, _custom, "velocity and data from expressions"),
)}


def _preset(scenario: Mapping[str, Any]) -> Preset:
    name = scenario.get("preset", "manufactured")
    preset = PRESETS.get(name)
    if preset is None:
        raise ConfigError(f"Unknown preset {name!r}", key="scenario.preset")
    return preset


def scenario_constants(scenario: Mapping[str, Any],
                       lengths: Mapping[str, float]) -> dict[str, float]:
    """
    Channel lengths plus the preset parameters (defaults overridden by
    `params`), as bound into every scenario expression.

    Raises:
        ConfigError: Unknown preset, or parameters that are not numbers.
    """
    params = dict(_preset(scenario).defaults)
    for key, value in (scenario.get("params") or {}).items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"Parameter {key} must be a number", key=f"scenario.params.{key}")
        params[key] = float(value)
    return {**{k: float(v) for k, v in lengths.items()}, **params}


def build_problem(scenario: Mapping[str, Any], lengths: Mapping[str, float],
                  T: float) -> ProblemData:
    """
    ProblemData for a scenario block.

    Raises:
        ConfigError: Unknown preset, or parameters that are not numbers.
        ExpressionError: A source expression is outside the grammar.
    """
    preset = _preset(scenario)
    constants = scenario_constants(scenario, lengths)
    problem = preset.builder(constants, float(T), scenario)
    log.debug("Built scenario %s with %s", preset.name, constants)
    return problem


def forcing_velocity(scenario: Mapping[str, Any],
                     lengths: Mapping[str, float]) -> ExpressionField:
    """f of the velocity form; zero unless `forcing_velocity` is given."""
    sources = scenario.get("forcing_velocity") or [0, 0, 0]
    return _field(sources, scenario_constants(scenario, lengths))


# ---------------------------------------------------------
# EULER-TYPE SCENARIO
# ---------------------------------------------------------
@dataclass(frozen=True, eq=False)
class EulerScenario:
    """
    u = (U, A sin(2πz/Lz) + b t, 0) solves the Euler equations with forcing
    f = (0, b, 0) and constant pressure; ω = curl u is steady.
    """
    velocity: ExpressionField
    forcing: ExpressionField
    vorticity: ExpressionField
    params: Mapping[str, float]


def euler_scenario(Lz: float = 1.0, U: float = 1.0, A: float = 0.5,
                   b: float = 0.3) -> EulerScenario:
    c = {"Lz": Lz, "U": U, "A": A, "b": b}
    velocity = _field(["U", "A * sin(2 * pi * z / Lz) + b * t", 0], c)
    forcing = _field([0, "b", 0], c)
    vorticity = _field(["-(2 * pi / Lz) * A * cos(2 * pi * z / Lz)", 0, 0], c)
    return EulerScenario(velocity, forcing, vorticity, c)
