"""
Tests for run configuration loading: defaults, overrides, schema
validation and the scenario presets.
"""
from collections.abc import Callable

import numpy as np
import pytest

# Internal package imports
from inflowlab.config import CONFIG_SCHEMA_TAG
from inflowlab.constants import DEFAULT_ODE_STEP, DEFAULT_SEED
from inflowlab.core.exceptions import ConfigError, SignConditionError
from inflowlab.scenarios.presets import (
    PRESETS,
    build_problem,
    forcing_velocity,
    scenario_constants
)
from inflowlab.scenarios.runconfig import apply_override, load_config, parse_config
from tests.conftest import base_config

LENGTHS = {"Lx": 1.0, "Ly": 2.0, "Lz": 3.0}


# ==========================================
# DEFAULTS
# ==========================================

def test_empty_document_takes_the_defaults() -> None:
    config = load_config({})
    assert config.raw["schema"] == CONFIG_SCHEMA_TAG
    assert config.preset == "manufactured"
    assert config.T == 0.5
    assert config.snapshot_times == [0.0, 0.25, 0.5]
    assert config.domain.shape == (17, 8, 8)
    assert config.seed == DEFAULT_SEED
    assert config.formats == ["json", "csv", "raw"]
    assert config.settings().ode_step == DEFAULT_ODE_STEP
    assert config.problem.name == "manufactured"


def test_snapshot_times_follow_the_horizon() -> None:
    config = load_config({"time": {"T": 2.0}})
    assert config.snapshot_times == [0.0, 1.0, 2.0]


def test_settings_come_from_the_tolerances() -> None:
    config = load_config(base_config(tolerances={"s_band": 3.0, "bisection_tol": 1e-9}))
    settings = config.settings()
    assert settings.ode_step == 0.05
    assert settings.band_width == pytest.approx(0.15)
    assert settings.bisection_tol == 1e-9


# ==========================================
# VALIDATION
# ==========================================

@pytest.mark.parametrize("doc, key", [
    ({"domain": {"Nq": 3}}, "domain.Nq"),
    ({"solver": {}}, "solver"),
    ({"schema": "inflowlab.config/0"}, "schema"),
    ({"domain": {"Nx": 2}}, "domain.Nx"),
    ({"scenario": {"preset": "vortex"}}, "scenario.preset"),
    ({"time": {"snapshot_times": [-0.1, 0.5]}}, "time.snapshot_times.0"),
])
def test_schema_violations_name_the_key(doc: dict, key: str) -> None:
    with pytest.raises(ConfigError) as exc:
        load_config(doc)
    assert exc.value.key == key


@pytest.mark.parametrize("times", [[0.5, 0.25], [0.0, 0.0], [0.0, 0.6]])
def test_snapshot_times_are_checked(times: list[float]) -> None:
    with pytest.raises(ConfigError) as exc:
        load_config({"time": {"snapshot_times": times}})
    assert exc.value.key == "time.snapshot_times"


def test_document_must_be_an_object() -> None:
    with pytest.raises(ConfigError):
        load_config([1, 2, 3])


def test_backward_velocity_is_rejected() -> None:
    with pytest.raises(SignConditionError):
        load_config(base_config("uniform", scenario={"params": {"U": -1.0}}))


def test_custom_expressions_need_a_velocity() -> None:
    with pytest.raises(ConfigError) as exc:
        load_config(base_config("custom-expressions"))
    assert exc.value.key == "scenario.velocity"


def test_custom_expressions_reject_mixed_data() -> None:
    scenario = {"velocity": [1, 0, 0],
                "data": {"Y_exact": [1, 0, 0], "Y0": [1, 0, 0]}}
    with pytest.raises(ConfigError):
        load_config(base_config("custom-expressions", scenario=scenario))


def test_custom_expressions_build_a_problem() -> None:
    scenario = {"velocity": ["U", 0, 0], "params": {"U": 2.0},
                "data": {"Y0": [1, 0, 0], "H": ["1 + t", 0, 0]}}
    config = load_config(base_config("custom-expressions", scenario=scenario))
    np.testing.assert_allclose(config.problem.u.eval(0.0, np.array([0.5, 0.5, 0.5])),
                               [2.0, 0.0, 0.0])
    np.testing.assert_allclose(config.problem.H.eval(0.5, np.array([0.0, 0.5, 0.5])),
                               [1.5, 0.0, 0.0])


# ==========================================
# OVERRIDES
# ==========================================

def test_apply_override_parses_json_values() -> None:
    doc: dict = {}
    apply_override(doc, "time.T=0.8")
    apply_override(doc, "output.directory=runs/a")
    apply_override(doc, "checks.jump_offsets=[2, 1]")
    assert doc == {"time": {"T": 0.8}, "output": {"directory": "runs/a"},
                   "checks": {"jump_offsets": [2, 1]}}


@pytest.mark.parametrize("assignment", ["time.T", "=1"])
def test_apply_override_needs_key_and_value(assignment: str) -> None:
    with pytest.raises(ConfigError):
        apply_override({}, assignment)


def test_apply_override_cannot_descend_into_a_value() -> None:
    with pytest.raises(ConfigError):
        apply_override({"time": 1.0}, "time.T=0.5")


def test_overrides_apply_before_validation() -> None:
    config = load_config(base_config(), ["scenario.preset=shear", "time.T=0.5"])
    assert config.preset == "shear"
    with pytest.raises(ConfigError):
        load_config(base_config(), ["domain.Nx=0"])


# ==========================================
# CONFIG FILES
# ==========================================

def test_parse_config_file(make_config: Callable[..., str]) -> None:
    config = parse_config(make_config(base_config()))
    assert config.preset == "zero"
    assert config.domain.Nx == 8
    assert config.snapshot_times == [0.0, 0.25, 0.5]


def test_parse_config_missing_file(tmp_path) -> None:
    with pytest.raises(FileNotFoundError):
        parse_config(str(tmp_path / "absent.json"))


def test_parse_config_bad_json(tmp_path) -> None:
    path = tmp_path / "config.json"
    path.write_text("{\"domain\": ", encoding="utf-8")
    with pytest.raises(ConfigError):
        parse_config(str(path))


# ==========================================
# PRESETS
# ==========================================

def test_scenario_constants_merge_lengths_and_params() -> None:
    constants = scenario_constants({"preset": "shear", "params": {"kappa": 2}}, LENGTHS)
    assert constants == {"Lx": 1.0, "Ly": 2.0, "Lz": 3.0, "U": 1.0, "kappa": 2.0}


def test_scenario_constants_reject_non_numbers() -> None:
    with pytest.raises(ConfigError) as exc:
        scenario_constants({"preset": "shear", "params": {"kappa": "big"}}, LENGTHS)
    assert exc.value.key == "scenario.params.kappa"


@pytest.mark.parametrize("name", sorted(set(PRESETS) - {"custom-expressions"}))
def test_every_preset_builds(name: str) -> None:
    problem = build_problem({"preset": name}, LENGTHS, 0.5)
    assert problem.name == name
    assert problem.T == 0.5


def test_preset_fields() -> None:
    shear = build_problem({"preset": "shear"}, LENGTHS, 0.5)
    np.testing.assert_allclose(shear.u.eval(0.0, np.array([0.4, 0.0, 0.0])), [1.0, 0.2, 0.0])
    mismatch = build_problem({"preset": "mismatch", "params": {"jump": 0.5}}, LENGTHS, 0.5)
    np.testing.assert_allclose(mismatch.H.eval(0.0, np.array([0.0, 0.5, 0.5])), [1.5, 0.0, 0.0])


def test_forcing_velocity_defaults_to_zero() -> None:
    f = forcing_velocity({"preset": "uniform"}, LENGTHS)
    np.testing.assert_allclose(f.eval(0.3, np.array([0.5, 0.5, 0.5])), 0.0)
    f = forcing_velocity({"preset": "uniform", "forcing_velocity": [0, "U", 0]}, LENGTHS)
    np.testing.assert_allclose(f.eval(0.3, np.array([0.5, 0.5, 0.5])), [0.0, 1.0, 0.0])
