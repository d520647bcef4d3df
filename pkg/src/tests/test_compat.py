"""
Tests for the compatibility residuals and for the jump of DY across S.

The shear problem u = (1, κ x1, 0), Y₀ = e₁, H = (1 + t) e₁ satisfies cond₀
but not cond₁: c = (1, -κ, 0). Its derivative jump at a point of S(t) is
B₋ c ⊗ Dτ = (1, κ (t - 1), 0) ⊗ (1, -1, 0, 0).
"""
from dataclasses import replace

import numpy as np
import pytest

# Internal package imports
from inflowlab.compat.conditions import (
    cond0_residual,
    cond1_vector,
    cond2_residual,
    compat_report,
    range_of_curl_residual
)
from inflowlab.compat.jumps import (
    jump_oracle,
    measure_jump,
    measure_jump_series,
    surface_normal
)
from inflowlab.core.exceptions import ConfigError, FormulaInapplicableError, OutOfDomainError
from inflowlab.geometry.boundary import TimeShiftedBoundary
from inflowlab.geometry.domain import ChannelDomain, Side
from inflowlab.geometry.fields import ExpressionField, GriddedField
from inflowlab.transport.problem import ProblemData, manufacture
from inflowlab.transport.solution import LagrangianSolver, SolverSettings

KAPPA = 0.5
T_JUMP = 0.4
ON_S = [0.4, 0.5, 0.5]


def _oracle(t: float) -> np.ndarray:
    return np.outer([1.0, KAPPA * (t - 1.0), 0.0], [1.0, -1.0, 0.0, 0.0])


# ==========================================
# COMPATIBILITY RESIDUALS
# ==========================================

def test_uniform_data_is_fully_compatible(uniform_data: ProblemData,
                                          domain: ChannelDomain) -> None:
    report = compat_report(uniform_data, domain)
    for name in ("cond0", "cond1", "cond2", "range_of_curl"):
        entry = report.entries[name]
        assert entry.passed, name
        assert entry.trusted and entry.available
        assert entry.residual == pytest.approx(0.0, abs=1e-12)


def test_shear_fails_first_order(shear_data: ProblemData, domain: ChannelDomain) -> None:
    """cond₁ fails with |c| = sqrt(1 + κ²); cond₂ is no longer trusted."""
    report = compat_report(shear_data, domain)
    assert report.passed("cond0")
    assert not report.passed("cond1")
    assert report.entries["cond1"].residual == pytest.approx(np.sqrt(1.0 + KAPPA**2))
    assert report.entries["cond1"].trusted
    assert not report.entries["cond2"].trusted
    assert report.fields["cond1"].shape == (domain.Ny, domain.Nz)


def test_cond1_vector_on_the_wall(shear_data: ProblemData, domain: ChannelDomain) -> None:
    c = cond1_vector(shear_data, domain.boundary_nodes(Side.PLUS))
    np.testing.assert_allclose(c[..., 0], 1.0)
    np.testing.assert_allclose(c[..., 1], -KAPPA)
    np.testing.assert_allclose(c[..., 2], 0.0)


def test_mismatch_fails_zeroth_order(mismatch_data: ProblemData, domain: ChannelDomain) -> None:
    report = compat_report(mismatch_data, domain)
    np.testing.assert_allclose(cond0_residual(mismatch_data, domain), 1.0)
    assert not report.passed("cond0")
    assert report.entries["cond1"].passed
    assert not report.entries["cond1"].trusted


def test_range_of_curl_residual(shear_data: ProblemData, domain: ChannelDomain) -> None:
    """∂_t H₁ = 1 with no forcing leaves a unit residual."""
    np.testing.assert_allclose(range_of_curl_residual(shear_data, domain, 0.0), 1.0)
    report = compat_report(shear_data, domain, times=(0.0, 0.25))
    assert report.entries["range_of_curl"].residual == pytest.approx(1.0)
    assert report.entries["range_of_curl"].passed is False


def test_gridded_initial_field_has_no_second_order(uniform_data: ProblemData,
                                                   domain: ChannelDomain) -> None:
    """Spline-backed data supports cond₀ and cond₁ only."""
    gridded = replace(uniform_data, Y0=GriddedField([uniform_data.Y0.sample(domain, 0.0)]))
    report = compat_report(gridded, domain)
    assert report.passed("cond0") and report.passed("cond1")
    entry = report.entries["cond2"]
    assert not entry.available
    assert entry.residual is None and entry.passed is None
    assert "conditions" in report.to_dict()


def _second_order_data() -> ProblemData:
    """
    Time-dependent shear with a manufactured Y whose only nonzero ∂_t² on
    Γ₊ is 6t in the first component.
    """
    u = ExpressionField.parse(["1 + t", "0.5 * x * (1 + t)", "sin(y)"])
    y_exact = ExpressionField.parse(["cos(y) + t**3", "sin(z) * (1 + t)", "x * y * exp(t)"])
    return manufacture(u, y_exact, 0.5)


def test_manufactured_data_meets_second_order(domain: ChannelDomain) -> None:
    """The terms of cond₂ do not vanish one by one here, yet they cancel."""
    data = _second_order_data()
    assert np.max(cond2_residual(data, domain)) <= 1e-12
    report = compat_report(data, domain)
    assert report.passed("cond2") and report.entries["cond2"].trusted


@pytest.mark.parametrize("delta", [0.01, 0.02, 0.04])
def test_shifted_inflow_breaks_second_order_linearly(domain: ChannelDomain,
                                                     delta: float) -> None:
    """H(t + δ) leaves ∂_t²H(0) - ∂_t²Y(0) = (6δ, 0, 0) on the wall."""
    data = _second_order_data()
    shifted = replace(data, H=TimeShiftedBoundary(data.H, delta))
    np.testing.assert_allclose(cond2_residual(shifted, domain), 6.0 * delta, rtol=1e-9)


# ==========================================
# JUMPS ACROSS S
# ==========================================

@pytest.fixture(name="shear_solver")
def fixture_shear_solver(shear_data: ProblemData, domain: ChannelDomain,
                         settings: SolverSettings) -> LagrangianSolver:
    return LagrangianSolver(shear_data, domain, settings)


@pytest.mark.parametrize("mode", ["closed", "fd"])
def test_jump_oracle_shear(shear_solver: LagrangianSolver, mode: str) -> None:
    np.testing.assert_allclose(jump_oracle(shear_solver, T_JUMP, ON_S, mode=mode),
                               _oracle(T_JUMP), atol=1e-6)


def test_jump_oracle_needs_a_point_on_s(shear_solver: LagrangianSolver) -> None:
    with pytest.raises(FormulaInapplicableError):
        jump_oracle(shear_solver, T_JUMP, [0.8, 0.5, 0.5])


def test_jump_oracle_needs_cond0(mismatch_data: ProblemData, domain: ChannelDomain,
                                 settings: SolverSettings) -> None:
    solver = LagrangianSolver(mismatch_data, domain, settings)
    with pytest.raises(FormulaInapplicableError):
        jump_oracle(solver, T_JUMP, ON_S)


def test_surface_normal_points_downstream(shear_solver: LagrangianSolver) -> None:
    np.testing.assert_allclose(surface_normal(shear_solver, T_JUMP, np.array(ON_S)),
                               [1.0, 0.0, 0.0], atol=1e-12)


def test_measured_jump_matches_oracle(shear_solver: LagrangianSolver) -> None:
    """Y is continuous across S while DY jumps by the predicted amount."""
    series = measure_jump_series(shear_solver, T_JUMP, ON_S, [0.04, 0.02])
    assert [m.eps for m in series.measurements] == [0.04, 0.02]
    assert np.linalg.norm(series.y_estimate) < 1e-3
    np.testing.assert_allclose(series.dy_estimate, _oracle(T_JUMP), atol=1e-4)
    assert set(series.to_dict()) == {"eps", "y_jump", "dy_jump", "y_estimate", "dy_estimate"}


def test_measured_jump_of_mismatched_data(mismatch_data: ProblemData, domain: ChannelDomain,
                                          settings: SolverSettings) -> None:
    """Without cond₀ the value itself jumps by H(0) - Y₀."""
    solver = LagrangianSolver(mismatch_data, domain, settings)
    series = measure_jump_series(solver, T_JUMP, ON_S, [0.04, 0.02])
    np.testing.assert_allclose(series.y_estimate, [1.0, 0.0, 0.0], atol=1e-9)


def test_single_offset_uses_the_finest_measurement(shear_solver: LagrangianSolver) -> None:
    series = measure_jump_series(shear_solver, T_JUMP, ON_S, [0.02])
    np.testing.assert_allclose(series.y_estimate, series.measurements[0].y_jump)


def test_jump_offsets_are_required(shear_solver: LagrangianSolver) -> None:
    with pytest.raises(ConfigError):
        measure_jump_series(shear_solver, T_JUMP, ON_S, [])


def test_straddle_points_must_stay_inside(shear_solver: LagrangianSolver) -> None:
    with pytest.raises(OutOfDomainError):
        measure_jump(shear_solver, 0.02, [0.02, 0.5, 0.5], 0.05)
