"""
Run Configuration
=================

Loads a UTF-8 JSON run configuration, applies dotted `--override` values,
merges the documented defaults and validates the result against a
Draft 2020-12 JSON schema. Unknown keys are rejected with the offending
dotted key named in the ConfigError.

After schema validation the scenario is built once so that semantic
problems (unknown expression names, sign-condition violations of the
velocity) surface at parse time.
"""
from __future__ import annotations

import json
import os
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import Any, Final

from jsonschema import Draft202012Validator
from jsonschema.exceptions import ValidationError

from inflowlab.config import CONFIG_SCHEMA_TAG, ENCODING_TYPE, JsonDict, deep_merge
from inflowlab.constants import (
    DEFAULT_CHECK_TOL,
    DEFAULT_FD_STEP,
    DEFAULT_HOLDER_ALPHA,
    DEFAULT_HOLDER_PAIRS,
    DEFAULT_ODE_STEP,
    DEFAULT_S_BAND,
    DEFAULT_SEED,
    EXTENSION_MARGIN_FRACTION,
    MIN_NX,
    MIN_NY,
    MIN_NZ,
    MIN_QUADRATURE_NODES,
    STRONG_RESIDUAL_BAND,
    TANGENCY_THRESHOLD
)
from inflowlab.core.exceptions import ConfigError
from inflowlab.geometry.domain import ChannelDomain
from inflowlab.paths import DEFAULT_OUTPUT_DIR
from inflowlab.scenarios.presets import PRESETS, build_problem
from inflowlab.transport.problem import ProblemData, check_velocity
from inflowlab.transport.solution import SolverSettings
from inflowlab.utils.det_encoding import detect_encoding, is_utf8_compatible
from inflowlab.utils.logger import get_logger

log = get_logger(__name__)

OUTPUT_FORMATS: Final = ("json", "csv", "raw")

DEFAULTS: Final[JsonDict] = {
    "schema": CONFIG_SCHEMA_TAG,
    "domain": {"Lx": 1.0, "Ly": 1.0, "Lz": 1.0, "Nx": 16, "Ny": 8, "Nz": 8},
    "time": {"T": 0.5, "ode_step": DEFAULT_ODE_STEP, "tstar_samples": 20},
    "scenario": {"preset": "manufactured", "params": {}},
    "tolerances": {
        "bisection_tol": None,
        "quadrature_order": MIN_QUADRATURE_NODES,
        "fd_step": DEFAULT_FD_STEP,
        "s_band": DEFAULT_S_BAND,
        "margin": EXTENSION_MARGIN_FRACTION,
        "strong_band": STRONG_RESIDUAL_BAND,
        "tangency": TANGENCY_THRESHOLD,
        "check": DEFAULT_CHECK_TOL,
    },
    "checks": {
        "velocity_recovery": False,
        "weak_residual": True,
        "holder_alpha": DEFAULT_HOLDER_ALPHA,
        "holder_pairs": DEFAULT_HOLDER_PAIRS,
        "jump_offsets": [4, 2, 1],
    },
    "output": {"directory": DEFAULT_OUTPUT_DIR, "formats": list(OUTPUT_FORMATS)},
    "seed": DEFAULT_SEED,
}

_POSITIVE: Final = {"type": "number", "exclusiveMinimum": 0}
_EXPRESSION: Final = {"type": ["string", "number"]}
_VECTOR: Final = {"type": "array", "items": _EXPRESSION, "minItems": 3, "maxItems": 3}


def _block(properties: Mapping[str, Any]) -> JsonDict:
    return {"type": "object", "properties": dict(properties), "additionalProperties": False}


SCHEMA: Final[JsonDict] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    **_block({
        "schema": {"const": CONFIG_SCHEMA_TAG},
        "domain": _block({
            "Lx": _POSITIVE, "Ly": _POSITIVE, "Lz": _POSITIVE,
            "Nx": {"type": "integer", "minimum": MIN_NX},
            "Ny": {"type": "integer", "minimum": MIN_NY},
            "Nz": {"type": "integer", "minimum": MIN_NZ},
        }),
        "time": _block({
            "T": _POSITIVE,
            "ode_step": _POSITIVE,
            "snapshot_times": {"type": "array", "items": {"type": "number", "minimum": 0},
                               "minItems": 1},
            "tstar_samples": {"type": "integer", "minimum": 1},
        }),
        "scenario": _block({
            "preset": {"enum": sorted(PRESETS)},
            "params": {"type": "object", "additionalProperties": {"type": "number"}},
            "velocity": _VECTOR,
            "data": _block({"Y_exact": _VECTOR, "Y0": _VECTOR, "H": _VECTOR, "g": _VECTOR}),
            "forcing_velocity": _VECTOR,
        }),
        "tolerances": _block({
            "bisection_tol": {"anyOf": [_POSITIVE, {"type": "null"}]},
            "quadrature_order": {"type": "integer", "minimum": MIN_QUADRATURE_NODES},
            "fd_step": _POSITIVE,
            "s_band": {"type": "number", "minimum": 0},
            "margin": _POSITIVE,
            "strong_band": {"type": "number", "minimum": 0},
            "tangency": _POSITIVE,
            "check": _POSITIVE,
        }),
        "checks": _block({
            "velocity_recovery": {"type": "boolean"},
            "weak_residual": {"type": "boolean"},
            "holder_alpha": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
            "holder_pairs": {"type": "integer", "minimum": 1},
            "jump_offsets": {"type": "array", "items": _POSITIVE, "minItems": 1},
        }),
        "output": _block({
            "directory": {"type": "string", "minLength": 1},
            "formats": {"type": "array", "items": {"enum": list(OUTPUT_FORMATS)},
                        "uniqueItems": True},
        }),
        "seed": {"type": "integer", "minimum": 0},
    }),
}

_VALIDATOR: Final = Draft202012Validator(SCHEMA)


def _error_key(error: ValidationError) -> str:
    path = [str(p) for p in error.absolute_path]
    if error.validator == "additionalProperties" and isinstance(error.instance, dict):
        allowed = set(error.schema.get("properties", {}))
        extra = sorted(k for k in error.instance if k not in allowed)
        if extra:
            path.append(extra[0])
    return ".".join(path) or "<root>"


def validate_document(doc: Mapping[str, Any]) -> None:
    """
    Raises:
        ConfigError: The first schema violation, keyed by its dotted path.
    """
    errors = sorted(_VALIDATOR.iter_errors(doc), key=lambda e: [str(p) for p in e.absolute_path])
    if errors:
        first = errors[0]
        raise ConfigError(f"Invalid configuration: {first.message}", key=_error_key(first))


def apply_override(doc: JsonDict, assignment: str) -> JsonDict:
    """
    Applies `dotted.key=VALUE` in place. VALUE is parsed as JSON and falls
    back to a plain string.
    """
    key, sep, raw = assignment.partition("=")
    if not sep or not key.strip():
        raise ConfigError(f"Override must look like key=value, got {assignment!r}",
                          key="--override")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    parts = key.strip().split(".")
    node = doc
    for part in parts[:-1]:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigError("Cannot override inside a non-object value", key=key)
        node = child
    node[parts[-1]] = value
    return doc


@dataclass(frozen=True, eq=False)
class RunConfig:
    """A validated run configuration with its scenario already built."""
    raw: JsonDict
    problem: ProblemData

    @property
    def domain(self) -> ChannelDomain:
        d = self.raw["domain"]
        return ChannelDomain(Lx=float(d["Lx"]), Ly=float(d["Ly"]), Lz=float(d["Lz"]),
                             Nx=int(d["Nx"]), Ny=int(d["Ny"]), Nz=int(d["Nz"]))

    @property
    def T(self) -> float:
        return float(self.raw["time"]["T"])

    @property
    def snapshot_times(self) -> list[float]:
        return [float(t) for t in self.raw["time"]["snapshot_times"]]

    @property
    def tstar_samples(self) -> int:
        return int(self.raw["time"]["tstar_samples"])

    @property
    def preset(self) -> str:
        return str(self.raw["scenario"]["preset"])

    @property
    def tolerances(self) -> JsonDict:
        return dict(self.raw["tolerances"])

    @property
    def checks(self) -> JsonDict:
        return dict(self.raw["checks"])

    @property
    def check_tol(self) -> float:
        return float(self.raw["tolerances"]["check"])

    @property
    def output_dir(self) -> str:
        return str(self.raw["output"]["directory"])

    @property
    def formats(self) -> list[str]:
        return list(self.raw["output"]["formats"])

    @property
    def seed(self) -> int:
        return int(self.raw["seed"])

    def settings(self) -> SolverSettings:
        tol = self.raw["tolerances"]
        return SolverSettings(
            ode_step=float(self.raw["time"]["ode_step"]),
            s_band=float(tol["s_band"]),
            bisection_tol=None if tol["bisection_tol"] is None else float(tol["bisection_tol"]),
            quadrature_order=int(tol["quadrature_order"]),
            fd_step=float(tol["fd_step"]),
            margin=float(tol["margin"]),
            tangency=float(tol["tangency"]))


def load_config(doc: Mapping[str, Any], overrides: Iterable[str] = ()) -> RunConfig:
    """
    Validates a configuration document.

    Raises:
        ConfigError: Schema or semantic violation.
        SignConditionError: The scenario velocity violates the sign condition.
    """
    if not isinstance(doc, Mapping):
        raise ConfigError("Configuration must be a JSON object", key="<root>")
    user = deep_merge(doc, {})
    for assignment in overrides:
        apply_override(user, assignment)
    merged = deep_merge(DEFAULTS, user)
    T = merged["time"].get("T")
    if "snapshot_times" not in merged["time"] and isinstance(T, (int, float)):
        merged["time"]["snapshot_times"] = [0.0, 0.5 * float(T), float(T)]
    validate_document(merged)

    times = merged["time"]["snapshot_times"]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ConfigError("snapshot_times must be strictly increasing", key="time.snapshot_times")
    if times[-1] > float(T):
        raise ConfigError(f"snapshot_times must lie in [0, {T}]", key="time.snapshot_times")
    if merged["scenario"]["preset"] == "custom-expressions" and "velocity" not in merged["scenario"]:
        raise ConfigError("custom-expressions needs a velocity", key="scenario.velocity")

    lengths = {k: merged["domain"][k] for k in ("Lx", "Ly", "Lz")}
    problem = build_problem(merged["scenario"], lengths, float(T))
    config = RunConfig(merged, problem)
    check_velocity(problem.u, config.domain, [0.0, float(T)])
    log.debug("Configuration validated: preset %s", config.preset)
    return config


def parse_config(path: str, overrides: Iterable[str] = ()) -> RunConfig:
    """
    Reads and validates a UTF-8 JSON run configuration.

    Raises:
        FileNotFoundError: The file does not exist.
        ConfigError: Encoding, JSON syntax, schema or semantic violation.
        SignConditionError: The scenario velocity violates the sign condition.
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(f"Configuration file not found: {path}")
    encoding = detect_encoding(path)
    if not is_utf8_compatible(encoding):
        raise ConfigError(f"Configuration must be UTF-8 (detected {encoding})", key=path)
    with open(path, "r", encoding=ENCODING_TYPE) as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Configuration is not valid JSON: {e}", key=path) from e
    log.info("Loading configuration %s", path)
    return load_config(doc, overrides)
