"""
Tests for the Hodge projections, the Biot–Savart operators and the velocity
form recovery on the steady-vorticity Euler flow

    u = (U, A sin(2πz) + b t, 0),   f = (0, b, 0),   ω = (-2πA cos(2πz), 0, 0).
"""
import numpy as np
import pytest

# Internal package imports
from inflowlab.core.exceptions import (
    DataCoverageError,
    IncompatibleFluxError,
    NotInRangeError
)
from inflowlab.curltools.biot_savart import (
    K_Un,
    biot_savart_K,
    check_range,
    harmonic_gradient
)
from inflowlab.curltools.hodge import (
    HodgeDecomposition,
    external_flux,
    harmonic_field,
    harmonic_project,
    internal_flux,
    leray_project
)
from inflowlab.curltools.spectral import nyquist_mask
from inflowlab.curltools.velocity import (
    Vc_harmonic,
    harmonic_history,
    recover_velocity_and_pressure,
    velocity_form_residual,
    wall_normal_velocity
)
from inflowlab.geometry.domain import ChannelDomain, GridVectorField, Side
from inflowlab.geometry.fields import ExpressionField
from inflowlab.geometry.operators import divergence
from inflowlab.scenarios.presets import euler_scenario

EULER = euler_scenario(Lz=1.0, U=1.0, A=0.5, b=0.3)
TIMES = [0.0, 0.25, 0.5]


@pytest.fixture(name="grid")
def fixture_grid() -> ChannelDomain:
    return ChannelDomain(Nx=8, Ny=4, Nz=8)


@pytest.fixture(name="omegas")
def fixture_omegas(grid: ChannelDomain) -> list[GridVectorField]:
    return [EULER.vorticity.sample(grid, t) for t in TIMES]


def _field(grid: ChannelDomain, components: list) -> GridVectorField:
    return ExpressionField.parse(components).sample(grid, 0.0)


# ==========================================
# HODGE DECOMPOSITION
# ==========================================

def test_leray_projection_of_a_random_field(grid: ChannelDomain) -> None:
    """P_H v is divergence free inside and tangent on both walls."""
    rng = np.random.default_rng(7)
    v = GridVectorField(grid, rng.standard_normal((3, *grid.shape)))
    projected = leray_project(v)
    assert np.max(np.abs(divergence(projected)[1:-1])) < 1e-9 * v.sup_norm
    np.testing.assert_allclose(projected.values[0, 0], 0.0, atol=1e-10)
    np.testing.assert_allclose(projected.values[0, -1], 0.0, atol=1e-10)


def test_hodge_parts_reassemble(grid: ChannelDomain) -> None:
    rng = np.random.default_rng(11)
    v = GridVectorField(grid, rng.standard_normal((3, *grid.shape)))
    parts = HodgeDecomposition.of(v)
    assert parts.reconstruction_error() < 1e-12
    c2, c3 = harmonic_project(parts.curl_part)
    assert abs(c2) < 1e-12 and abs(c3) < 1e-12


def test_harmonic_projection_of_constants(grid: ChannelDomain) -> None:
    v = _field(grid, [0, 2, -1])
    assert harmonic_project(v) == pytest.approx((2.0, -1.0))
    np.testing.assert_allclose(harmonic_field(v, (2.0, -1.0)).values, v.values)


# ==========================================
# FLUXES AND THE RANGE OF CURL
# ==========================================

def test_external_flux_signs(grid: ChannelDomain) -> None:
    """∫ ω·n with n = -e₁ on Γ₊ and +e₁ on Γ₋."""
    omega = _field(grid, [1, 0, 0])
    assert external_flux(omega, Side.PLUS) == pytest.approx(-1.0)
    assert external_flux(omega, Side.MINUS) == pytest.approx(1.0)
    with pytest.raises(NotInRangeError):
        check_range(omega)


def test_divergent_vorticity_is_out_of_range(grid: ChannelDomain) -> None:
    with pytest.raises(NotInRangeError):
        check_range(_field(grid, [0, "sin(2 * pi * y)", 0]))


def test_internal_flux(grid: ChannelDomain) -> None:
    assert internal_flux(_field(grid, [0, 1, 0])) == pytest.approx((1.0, 0.0))
    with pytest.raises(NotInRangeError):
        internal_flux(_field(grid, [0, "sin(2 * pi * y)", 0]))


# ==========================================
# BIOT–SAVART
# ==========================================

def test_biot_savart_of_a_shear_layer(grid: ChannelDomain, omegas: list[GridVectorField]) -> None:
    """K[ω] = (0, A sin(2πz), 0): tangent, divergence free, no harmonic part."""
    v = biot_savart_K(omegas[0])
    expected = _field(grid, [0, "0.5 * sin(2 * pi * z)", 0])
    np.testing.assert_allclose(v.values, expected.values, atol=1e-10)


def test_k_un_adds_the_normal_trace(grid: ChannelDomain, omegas: list[GridVectorField]) -> None:
    v = K_Un(omegas[0], -np.ones((grid.Ny, grid.Nz)), np.ones((grid.Ny, grid.Nz)))
    expected = _field(grid, [1, "0.5 * sin(2 * pi * z)", 0])
    np.testing.assert_allclose(v.values, expected.values, atol=1e-10)


def test_harmonic_gradient_matches_wall_data(grid: ChannelDomain) -> None:
    y = grid.boundary_nodes(Side.PLUS)[..., 1]
    trace = 1.0 + 0.2 * np.cos(2 * np.pi * y)
    template = GridVectorField.zeros(grid)
    v = harmonic_gradient(-trace, trace, template)
    np.testing.assert_allclose(v.values[0, 0], trace, atol=1e-10)
    np.testing.assert_allclose(v.values[0, -1], trace, atol=1e-10)
    assert np.max(np.abs(divergence(v)[1:-1])) < 1e-9


def test_harmonic_gradient_needs_balanced_flux(grid: ChannelDomain) -> None:
    shape = (grid.Ny, grid.Nz)
    with pytest.raises(IncompatibleFluxError):
        harmonic_gradient(-np.ones(shape), 2.0 * np.ones(shape), GridVectorField.zeros(grid))


# ==========================================
# VELOCITY FORM
# ==========================================

def test_wall_normal_velocity(grid: ChannelDomain) -> None:
    un_plus, un_minus = wall_normal_velocity(EULER.velocity, grid, 0.25)
    np.testing.assert_allclose(un_plus, -1.0)
    np.testing.assert_allclose(un_minus, 1.0)


def test_harmonic_history_follows_the_forcing(omegas: list[GridVectorField]) -> None:
    """c₂(t) = b t: the forcing drives the mean cross-flow, rotation does not."""
    history = harmonic_history(EULER.velocity, omegas, EULER.forcing, (0.0, 0.0))
    np.testing.assert_allclose(history[:, 0], [0.0, 0.075, 0.15], atol=1e-10)
    np.testing.assert_allclose(history[:, 1], 0.0, atol=1e-10)
    c = Vc_harmonic(EULER.velocity, omegas, EULER.forcing, (0.0, 0.0), 0.5)
    assert c == pytest.approx((0.15, 0.0), abs=1e-10)


def test_recover_velocity_and_pressure(grid: ChannelDomain,
                                       omegas: list[GridVectorField]) -> None:
    recovery = recover_velocity_and_pressure(EULER.velocity, omegas, EULER.forcing, 0.25)
    np.testing.assert_allclose(recovery.velocity.values,
                               EULER.velocity.sample(grid, 0.25).values, atol=1e-9)
    assert recovery.harmonic == pytest.approx((0.075, 0.0), abs=1e-10)
    assert velocity_form_residual(recovery) < 1e-8


def test_velocity_form_needs_three_snapshots(omegas: list[GridVectorField]) -> None:
    with pytest.raises(DataCoverageError):
        recover_velocity_and_pressure(EULER.velocity, omegas[:2], EULER.forcing, 0.0)
    with pytest.raises(DataCoverageError):
        Vc_harmonic(EULER.velocity, omegas, EULER.forcing, (0.0, 0.0), 0.3)


# ==========================================
# NYQUIST MODES
# ==========================================

def _alternating_in_y(grid: ChannelDomain) -> np.ndarray:
    """(-1)^j on the y nodes, broadcast over the channel."""
    return np.cos(np.pi * grid.Ny * grid.nodes()[..., 1] / grid.Ly)


def test_nyquist_mask(grid: ChannelDomain) -> None:
    mask = nyquist_mask(grid)
    assert mask.shape == (grid.Ny, grid.Nz)
    assert mask[grid.Ny // 2].all() and mask[:, grid.Nz // 2].all()
    assert np.count_nonzero(mask) == grid.Ny + grid.Nz - 1
    assert not mask[0, 0] and not mask[1, 3]
    assert not nyquist_mask(ChannelDomain(Nx=8, Ny=5, Nz=5)).any()


def test_leray_projection_drops_nyquist_modes(grid: ChannelDomain) -> None:
    """A field living on the y Nyquist mode has no resolved solenoidal part."""
    alt = _alternating_in_y(grid)
    x1 = grid.nodes()[..., 0]
    v = GridVectorField(grid, np.stack([x1 * alt, alt, (1.0 - x1) * alt]))
    np.testing.assert_allclose(leray_project(v).values, 0.0, atol=1e-12)


def test_biot_savart_ignores_nyquist_modes(grid: ChannelDomain) -> None:
    alt = _alternating_in_y(grid)
    omega = GridVectorField(grid, np.stack([np.zeros_like(alt), np.zeros_like(alt), alt]))
    np.testing.assert_allclose(biot_savart_K(omega, check=False).values, 0.0, atol=1e-12)


def test_harmonic_gradient_ignores_nyquist_traces(grid: ChannelDomain) -> None:
    """A balanced Nyquist trace on both walls produces no field."""
    trace = _alternating_in_y(grid)[0]
    v = harmonic_gradient(-trace, trace, GridVectorField.zeros(grid))
    np.testing.assert_allclose(v.values, 0.0, atol=1e-12)
