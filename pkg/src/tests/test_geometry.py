"""
Tests for the channel grid, discrete operators, interpolation, the Hölder
estimator and the field providers.
"""
import numpy as np
import pytest

# Internal package imports
from inflowlab.core.exceptions import (
    CapabilityError,
    ConfigError,
    DataCoverageError,
    GeometryError,
    NumericError,
    OutOfDomainError
)
from inflowlab.geometry.boundary import AnalyticBoundary, BoundaryField, TimeShiftedBoundary
from inflowlab.geometry.domain import ChannelDomain, GridVectorField, Side
from inflowlab.geometry.fields import ExpressionField, GriddedField, TimeShiftedField, ZeroField
from inflowlab.geometry.holder import holder_seminorm
from inflowlab.geometry.interpolation import interpolate
from inflowlab.geometry.operators import (
    curl,
    d_dx1,
    d_dy,
    d_dz,
    divergence,
    gradient,
    surface_divergence,
    surface_gradient,
    surface_integral,
    volume_integral
)


def _field(domain: ChannelDomain, sources: list[str | float], t: float = 0.0) -> GridVectorField:
    return ExpressionField.parse(sources, {"Lx": domain.Lx, "Ly": domain.Ly,
                                           "Lz": domain.Lz}).sample(domain, t)


# ==========================================
# CHANNEL DOMAIN
# ==========================================

def test_grid_shapes(domain: ChannelDomain) -> None:
    """x1 includes both walls; y and z are periodic without the end point."""
    assert domain.nodes().shape == (17, 8, 8, 3)
    assert domain.boundary_nodes(Side.PLUS).shape == (8, 8, 3)
    assert np.all(domain.boundary_nodes(Side.MINUS)[..., 0] == domain.Lx)
    assert domain.hx == pytest.approx(1.0 / 16)
    assert domain.x2[-1] == pytest.approx(1.0 - 1.0 / 8)


def test_dict_round_trip(domain: ChannelDomain) -> None:
    assert ChannelDomain.from_dict(domain.to_dict()) == domain


@pytest.mark.parametrize("kwargs", [
    {"Nx": 4},
    {"Ny": 2},
    {"Nz": 3},
    {"Lx": 0.0},
    {"Ly": -1.0},
])
def test_invalid_domains(kwargs: dict[str, float]) -> None:
    """Grid counts below the minimums and non-positive lengths are rejected."""
    with pytest.raises(GeometryError):
        ChannelDomain(**kwargs)


def test_grid_field_validation(domain: ChannelDomain) -> None:
    """Wrong shapes and non-finite values are rejected on construction."""
    with pytest.raises(GeometryError):
        GridVectorField(domain, np.zeros((3, 4, 4, 4)))
    bad = np.zeros((3, *domain.shape))
    bad[1, 2, 3, 4] = np.nan
    with pytest.raises(NumericError):
        GridVectorField(domain, bad)


def test_grid_field_point_layout(domain: ChannelDomain) -> None:
    """from_points and at_points are inverse layouts."""
    pts = domain.nodes()
    f = GridVectorField.from_points(domain, pts)
    np.testing.assert_array_equal(f.at_points(), pts)
    np.testing.assert_array_equal(f.component(0), pts[..., 0])


def test_wrap_and_contains(domain: ChannelDomain) -> None:
    """y and z wrap into the period; x1 is only checked."""
    wrapped = domain.wrap([0.5, 1.25, -0.25])
    np.testing.assert_allclose(wrapped, [0.5, 0.25, 0.75])
    assert not domain.contains([1.2, 0.0, 0.0])
    with pytest.raises(OutOfDomainError):
        domain.require_inside([[0.5, 0.0, 0.0], [-0.1, 0.0, 0.0]])


# ==========================================
# DISCRETE OPERATORS
# ==========================================

def test_x1_derivative_is_exact_on_quadratics(domain: ChannelDomain) -> None:
    """Centered differences and the one-sided wall closures are exact on quadratics."""
    x1 = domain.nodes()[..., 0]
    np.testing.assert_allclose(d_dx1(3.0 * x1 ** 2 - x1, domain), 6.0 * x1 - 1.0, atol=1e-10)


def test_spectral_derivatives(domain: ChannelDomain) -> None:
    """Resolved Fourier modes are differentiated exactly in y and z."""
    pts = domain.nodes()
    y, z = pts[..., 1], pts[..., 2]
    k = 2.0 * np.pi
    np.testing.assert_allclose(d_dy(np.sin(k * y), domain), k * np.cos(k * y), atol=1e-10)
    np.testing.assert_allclose(d_dz(np.cos(2 * k * z), domain),
                               -2 * k * np.sin(2 * k * z), atol=1e-10)


def test_nyquist_mode_has_zero_derivative(domain: ChannelDomain) -> None:
    """The unresolved Nyquist mode is dropped by the derivative symbol."""
    y = domain.nodes()[..., 1]
    nyquist = np.cos(np.pi * domain.Ny * y / domain.Ly)
    np.testing.assert_allclose(d_dy(nyquist, domain), 0.0, atol=1e-10)


def test_div_curl_and_curl_grad_vanish(domain: ChannelDomain) -> None:
    """The operator pairing makes div∘curl and curl∘grad vanish to round-off."""
    rng = np.random.default_rng(7)
    v = GridVectorField(domain, rng.standard_normal((3, *domain.shape)))
    assert np.max(np.abs(divergence(curl(v)))) < 1e-9

    q = rng.standard_normal(domain.shape)
    grad_q = GridVectorField(domain, gradient(q, domain))
    assert curl(grad_q).sup_norm < 1e-9


def test_divergence_of_analytic_field(domain: ChannelDomain) -> None:
    """div (x², sin(2πy), 0) = 2x + 2π cos(2πy)."""
    f = _field(domain, ["x**2", "sin(2 * pi * y)", 0])
    pts = domain.nodes()
    expected = 2.0 * pts[..., 0] + 2.0 * np.pi * np.cos(2.0 * np.pi * pts[..., 1])
    np.testing.assert_allclose(divergence(f), expected, atol=1e-9)


def test_divergence_needs_a_domain_for_raw_arrays(domain: ChannelDomain) -> None:
    with pytest.raises(GeometryError):
        divergence(np.zeros((3, *domain.shape)))


def test_volume_integral(domain: ChannelDomain) -> None:
    """Trapezoid in x1 is exact for linear profiles."""
    x1 = domain.nodes()[..., 0]
    assert volume_integral(np.ones(domain.shape), domain) == pytest.approx(domain.volume)
    assert volume_integral(x1, domain) == pytest.approx(0.5)


def test_surface_divergence_requires_tangential_fields(domain: ChannelDomain) -> None:
    """A wall field with a normal component is rejected."""
    w = np.zeros((3, domain.Ny, domain.Nz))
    w[0] = 1.0
    with pytest.raises(GeometryError):
        surface_divergence(w, domain)
    w[0] = 0.0
    w[1] = np.sin(2.0 * np.pi * domain.x2)[:, None]
    expected = 2.0 * np.pi * np.cos(2.0 * np.pi * domain.x2)[:, None] * np.ones(domain.Nz)
    np.testing.assert_allclose(surface_divergence(w, domain), expected, atol=1e-10)


def _wall_grid(domain: ChannelDomain) -> tuple[np.ndarray, np.ndarray]:
    return np.meshgrid(domain.x2, domain.x3, indexing="ij")


def test_surface_divergence_integrates_to_zero(domain: ChannelDomain) -> None:
    """A tangential field on a flat torus has no net surface divergence."""
    y, z = _wall_grid(domain)
    w = np.stack([np.zeros_like(y),
                  1.0 + np.cos(2.0 * np.pi * y) * np.sin(2.0 * np.pi * z),
                  np.sin(2.0 * np.pi * y) + np.cos(4.0 * np.pi * z)])
    div = surface_divergence(w, domain)
    assert np.max(np.abs(div)) > 1.0
    assert abs(surface_integral(div, domain)) < 1e-12


def test_surface_integration_by_parts(domain: ChannelDomain) -> None:
    """∫_Γ φ div_Γ w = -∫_Γ ∇_Γ φ · w for periodic φ and tangential w."""
    y, z = _wall_grid(domain)
    phi = np.sin(2.0 * np.pi * y) + np.cos(4.0 * np.pi * z)
    w = np.stack([np.zeros_like(y),
                  np.cos(2.0 * np.pi * y) + np.sin(2.0 * np.pi * z),
                  np.sin(4.0 * np.pi * z) * np.cos(2.0 * np.pi * y)])
    grad = surface_gradient(phi, domain)
    np.testing.assert_allclose(grad[0], 0.0)
    np.testing.assert_allclose(grad[1], 2.0 * np.pi * np.cos(2.0 * np.pi * y), atol=1e-10)

    lhs = surface_integral(phi * surface_divergence(w, domain), domain)
    rhs = -surface_integral(np.sum(grad * w, axis=0), domain)
    assert abs(lhs) > 0.1
    assert lhs == pytest.approx(rhs, abs=1e-12)


# ==========================================
# INTERPOLATION AND HÖLDER ESTIMATES
# ==========================================

def test_interpolation_reproduces_cubics_in_x1(domain: ChannelDomain) -> None:
    """Tricubic interpolation is exact for fields cubic in x1 and constant in y, z."""
    f = _field(domain, ["x**3", 1, "2 * x"])
    pts = np.array([[0.13, 0.31, 0.77], [0.91, 0.05, 0.5], [0.5, 0.999, 0.0]])
    expected = np.stack([pts[:, 0] ** 3, np.ones(3), 2.0 * pts[:, 0]], axis=-1)
    np.testing.assert_allclose(interpolate(f, pts), expected, atol=1e-10)


def test_interpolation_outside_the_channel(domain: ChannelDomain) -> None:
    f = GridVectorField.zeros(domain)
    with pytest.raises(OutOfDomainError):
        interpolate(f, [[1.5, 0.0, 0.0]])


def test_holder_seminorm_of_linear_field(domain: ChannelDomain) -> None:
    """For f = x1 and α = 1 the estimate is the Lipschitz constant 1."""
    x1 = domain.nodes()[..., 0]
    estimate = holder_seminorm(x1, domain, alpha=1.0, pair_budget=500, seed=3)
    assert estimate == pytest.approx(1.0)


def test_holder_seminorm_of_constant_field(domain: ChannelDomain) -> None:
    values = np.full((3, *domain.shape), 2.0)
    assert holder_seminorm(values, domain, alpha=0.5, pair_budget=200) == 0.0


def test_holder_seminorm_is_seeded(domain: ChannelDomain) -> None:
    """Equal seeds give equal estimates."""
    rng = np.random.default_rng(11)
    values = rng.standard_normal(domain.shape)
    a = holder_seminorm(values, domain, alpha=0.5, pair_budget=3000, seed=5)
    b = holder_seminorm(values, domain, alpha=0.5, pair_budget=3000, seed=5)
    assert a == b


def test_holder_seminorm_of_linear_field_at_half_exponent(domain: ChannelDomain) -> None:
    """For f = x1 and α = 1/2 the sup of Δx1 / |Δx|^(1/2) is reached at Δx = (1, 0, 0)."""
    x1 = domain.nodes()[..., 0]
    estimate = holder_seminorm(x1, domain, alpha=0.5, pair_budget=500, seed=3)
    assert estimate == pytest.approx(1.0)


@pytest.mark.parametrize("alpha", [0.5, 1.0])
def test_holder_seminorm_grows_with_the_budget(domain: ChannelDomain, alpha: float) -> None:
    """With a fixed seed, more pairs never lower the estimate."""
    rng = np.random.default_rng(19)
    values = rng.standard_normal((3, *domain.shape))
    estimates = [holder_seminorm(values, domain, alpha=alpha, pair_budget=budget, seed=8)
                 for budget in (100, 1000, 5000)]
    assert estimates[0] > 0.0
    assert estimates == sorted(estimates)


@pytest.mark.parametrize("alpha,budget", [(0.0, 10), (1.5, 10), (0.5, 0)])
def test_holder_rejects_bad_parameters(domain: ChannelDomain, alpha: float, budget: int) -> None:
    with pytest.raises(ConfigError):
        holder_seminorm(np.zeros(domain.shape), domain, alpha=alpha, pair_budget=budget)


# ==========================================
# FIELD PROVIDERS
# ==========================================

def test_expression_field_derivatives() -> None:
    """Symbolic gradient, time derivative and Hessian of an analytic field."""
    f = ExpressionField.parse(["x * y", "z**2", "t * x"])
    pt = np.array([[2.0, 3.0, 0.5]])
    np.testing.assert_allclose(f.eval(1.5, pt), [[6.0, 0.25, 3.0]])
    np.testing.assert_allclose(f.grad(1.5, pt)[0], [[3.0, 2.0, 0.0],
                                                    [0.0, 0.0, 1.0],
                                                    [1.5, 0.0, 0.0]])
    np.testing.assert_allclose(f.dt(1.5, pt), [[0.0, 0.0, 2.0]])
    assert f.hessian(0.0, pt)[0, 0, 0, 1] == pytest.approx(1.0)
    assert f.dt_grad(0.0, pt)[0, 2, 0] == pytest.approx(1.0)


def test_expression_field_needs_three_components() -> None:
    with pytest.raises(ConfigError):
        ExpressionField.parse(["x", "y"])


def test_zero_field_shapes(domain: ChannelDomain) -> None:
    z = ZeroField()
    pts = domain.nodes()
    assert z.eval(0.0, pts).shape == pts.shape
    assert z.grad(0.0, pts).shape == (*pts.shape, 3)
    assert z.sample(domain, 0.3).sup_norm == 0.0


def test_gridded_field_static(domain: ChannelDomain) -> None:
    """One snapshot gives a time-independent provider."""
    f = GriddedField([_field(domain, ["x**2", 0, 1])])
    pts = np.array([[0.3, 0.2, 0.1]])
    np.testing.assert_allclose(f.eval(5.0, pts), [[0.09, 0.0, 1.0]], atol=1e-10)
    np.testing.assert_allclose(f.grad(5.0, pts)[0, 0], [0.6, 0.0, 0.0], atol=1e-9)
    np.testing.assert_allclose(f.dt(5.0, pts), 0.0)
    with pytest.raises(CapabilityError):
        f.hessian(0.0, pts)


def test_gridded_field_in_time(domain: ChannelDomain) -> None:
    """Several snapshots are interpolated in time and bounded by their range."""
    snaps = [_field(domain, ["t * x", 0, 0], t) for t in (0.0, 0.5, 1.0)]
    f = GriddedField(snaps)
    pts = np.array([[0.4, 0.0, 0.0]])
    assert f.eval(0.75, pts)[0, 0] == pytest.approx(0.3)
    assert f.dt(0.75, pts)[0, 0] == pytest.approx(0.4)
    with pytest.raises(DataCoverageError):
        f.eval(1.5, pts)


def test_gridded_field_needs_snapshots() -> None:
    with pytest.raises(ConfigError):
        GriddedField([])


def test_time_shifted_field() -> None:
    base = ExpressionField.parse(["t", 0, 0])
    shifted = TimeShiftedField(base, 0.25)
    assert shifted.eval(0.5, [[0.0, 0.0, 0.0]])[0, 0] == pytest.approx(0.75)


# ==========================================
# INFLOW DATA
# ==========================================

def test_analytic_boundary_evaluates_on_the_wall() -> None:
    """The trace ignores x1 and always evaluates on Γ₊."""
    h = AnalyticBoundary(ExpressionField.parse(["1 + x + t", "y", 0]))
    np.testing.assert_allclose(h.eval(0.5, [[0.7, 0.25, 0.0]]), [[1.5, 0.25, 0.0]])
    np.testing.assert_allclose(h.dt(0.5, [[0.7, 0.25, 0.0]]), [[1.0, 0.0, 0.0]])


def test_sampled_boundary_matches_the_source(domain: ChannelDomain) -> None:
    """Sampling an analytic trace reproduces it at the nodes and between sample times."""
    source = AnalyticBoundary(ExpressionField.parse(["1 + t", 0, "t**2"]))
    sampled = BoundaryField.sample(source, domain, np.linspace(0.0, 1.0, 11))
    nodes = domain.boundary_nodes(Side.PLUS)
    np.testing.assert_allclose(sampled.eval(0.33, nodes), source.eval(0.33, nodes), atol=1e-10)
    np.testing.assert_allclose(sampled.dt(0.33, nodes), source.dt(0.33, nodes), atol=1e-10)
    assert sampled.time_range == (0.0, 1.0)


def test_sampled_boundary_coverage(domain: ChannelDomain) -> None:
    """Times outside the sampled range need an explicit coverage tolerance."""
    source = AnalyticBoundary(ExpressionField.parse([1, 0, 0]))
    sampled = BoundaryField.sample(source, domain, [0.0, 0.5, 1.0])
    with pytest.raises(DataCoverageError):
        sampled.eval(1.2, [[0.0, 0.0, 0.0]])
    lenient = BoundaryField.sample(source, domain, [0.0, 0.5, 1.0], coverage_tol=0.5)
    np.testing.assert_allclose(lenient.eval(1.2, [[0.0, 0.0, 0.0]]), [[1.0, 0.0, 0.0]])


def test_boundary_rejects_bad_samples(domain: ChannelDomain) -> None:
    values = np.zeros((2, 3, domain.Ny, domain.Nz))
    with pytest.raises(DataCoverageError):
        BoundaryField(domain, [0.5, 0.5], values)
    with pytest.raises(DataCoverageError):
        BoundaryField(domain, [0.0, 1.0], values[:, :, :2])


def test_boundary_without_second_derivative(domain: ChannelDomain) -> None:
    values = np.zeros((2, 3, domain.Ny, domain.Nz))
    h = BoundaryField(domain, [0.0, 1.0], values)
    with pytest.raises(DataCoverageError):
        h.dt(0.5, [[0.0, 0.0, 0.0]])
    with pytest.raises(CapabilityError):
        h.dtt(0.5, [[0.0, 0.0, 0.0]])


def test_time_shifted_boundary() -> None:
    h = TimeShiftedBoundary(AnalyticBoundary(ExpressionField.parse(["t", 0, 0])), 1.0)
    assert h.eval(0.5, [[0.0, 0.0, 0.0]])[0, 0] == pytest.approx(1.5)
    assert h.time_range is None
