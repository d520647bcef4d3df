# Shared fixtures
# ---------------
# domain       -> a coarse 16 x 8 x 8 channel used by most tests
# settings     -> solver settings with a coarse ODE step
# make_config  -> writes a run configuration JSON under tmp_path

import json
from pathlib import Path
from typing import Any
from collections.abc import Callable
import pytest

# Internal package imports
from inflowlab.config import CONFIG_SCHEMA_TAG, ENCODING_TYPE, deep_merge
from inflowlab.geometry.boundary import AnalyticBoundary
from inflowlab.geometry.domain import ChannelDomain
from inflowlab.geometry.fields import ExpressionField, ZeroField
from inflowlab.transport.problem import ProblemData
from inflowlab.transport.solution import SolverSettings


@pytest.fixture(name="domain")
def fixture_domain() -> ChannelDomain:
    """Unit channel at the default 16 x 8 x 8 resolution."""
    return ChannelDomain(Lx=1.0, Ly=1.0, Lz=1.0, Nx=16, Ny=8, Nz=8)


@pytest.fixture(name="settings")
def fixture_settings() -> SolverSettings:
    return SolverSettings(ode_step=0.01)


@pytest.fixture(name="uniform_data")
def fixture_uniform_data() -> ProblemData:
    """u = (1, 0, 0) with seamless data Y0 = H = (1, 0, 0)."""
    return ProblemData(u=ExpressionField.parse([1, 0, 0]),
                       Y0=ExpressionField.parse([1, 0, 0]),
                       H=AnalyticBoundary(ExpressionField.parse([1, 0, 0])),
                       g=ZeroField(), T=0.5, name="uniform")


@pytest.fixture(name="mismatch_data")
def fixture_mismatch_data() -> ProblemData:
    """Uniform flow with an inflow value one unit above the initial value."""
    return ProblemData(u=ExpressionField.parse([1, 0, 0]),
                       Y0=ExpressionField.parse([1, 0, 0]),
                       H=AnalyticBoundary(ExpressionField.parse([2, 0, 0])),
                       g=ZeroField(), T=0.5, name="mismatch")


@pytest.fixture(name="shear_data")
def fixture_shear_data() -> ProblemData:
    """u = (1, 0.5 x, 0), Y0 = (1, 0, 0), H = (1 + t, 0, 0)."""
    return ProblemData(u=ExpressionField.parse([1, "0.5 * x", 0]),
                       Y0=ExpressionField.parse([1, 0, 0]),
                       H=AnalyticBoundary(ExpressionField.parse(["1 + t", 0, 0])),
                       g=ZeroField(), T=0.5, name="shear")


def base_config(preset: str = "zero", **sections: Any) -> dict[str, Any]:
    """A small, fast run configuration; keyword sections are deep-merged in."""
    doc: dict[str, Any] = {
        "schema": CONFIG_SCHEMA_TAG,
        "domain": {"Lx": 1.0, "Ly": 1.0, "Lz": 1.0, "Nx": 8, "Ny": 4, "Nz": 4},
        "time": {"T": 0.5, "ode_step": 0.05, "snapshot_times": [0.0, 0.25, 0.5]},
        "scenario": {"preset": preset},
        "checks": {"weak_residual": False},
    }
    return deep_merge(doc, sections)


@pytest.fixture(name="make_config")
def fixture_make_config(tmp_path: Path) -> Callable[..., str]:
    """
    Factory fixture: writes a configuration document to tmp_path and returns
    its path as a string.
    """
    def _make(doc: dict[str, Any], name: str = "config.json") -> str:
        path = tmp_path / name
        path.write_text(json.dumps(doc), encoding=ENCODING_TYPE)
        return str(path)

    return _make
