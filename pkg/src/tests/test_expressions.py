import math
import numpy as np
import pytest

# Internal package imports
from inflowlab.core.exceptions import ConfigError, ExpressionError
from inflowlab.core.expressions import Const, parse_expression


def _env(t: float = 0.0, x: float = 0.0, y: float = 0.0, z: float = 0.0) -> dict[str, float]:
    return {"t": t, "x": x, "y": y, "z": z}


# ==========================================
# PARSING
# ==========================================

def test_numbers_fold_to_constants() -> None:
    """Constant arithmetic and bare numbers collapse to a single Const."""
    assert parse_expression(2.5) == Const(2.5)
    assert parse_expression("2 * 3 + 1") == Const(7.0)
    assert parse_expression("-(4)") == Const(-4.0)


def test_pi_and_bound_constants() -> None:
    """pi is always bound; lengths and parameters come from the constants map."""
    e = parse_expression("kappa * Lx + pi", {"kappa": 0.5, "Lx": 2.0})
    assert isinstance(e, Const)
    assert e.value == pytest.approx(1.0 + math.pi)


def test_evaluate_on_arrays() -> None:
    """Expressions evaluate elementwise on numpy arrays."""
    e = parse_expression("x**2 + 3*y - t")
    xs = np.array([0.0, 1.0, 2.0])
    out = e.evaluate({"t": 1.0, "x": xs, "y": np.ones(3), "z": 0.0})
    np.testing.assert_allclose(out, [2.0, 3.0, 6.0])


def test_functions() -> None:
    """sin, cos and exp are available."""
    e = parse_expression("sin(x) + cos(y) * exp(z)")
    assert e.evaluate(_env(x=0.5, y=0.25, z=0.1)) == pytest.approx(
        math.sin(0.5) + math.cos(0.25) * math.exp(0.1))


def test_variables() -> None:
    """Only the free variables among t, x, y, z are reported."""
    assert parse_expression("x * t + 1").variables() == frozenset({"x", "t"})
    assert parse_expression("3").variables() == frozenset()


# ==========================================
# SYMBOLIC DERIVATIVES
# ==========================================

def test_polynomial_derivative() -> None:
    """d/dx of x**3 * y is 3 x**2 y."""
    d = parse_expression("x**3 * y").diff("x")
    assert d.evaluate(_env(x=2.0, y=0.5)) == pytest.approx(6.0)
    assert parse_expression("x**3 * y").diff("t").is_zero()


def test_quotient_and_chain_rule() -> None:
    """Derivatives through division and function composition."""
    d = parse_expression("sin(2 * x) / (1 + t)").diff("x")
    assert d.evaluate(_env(t=1.0, x=0.3)) == pytest.approx(math.cos(0.6))
    d_exp = parse_expression("exp(x * y)").diff("y")
    assert d_exp.evaluate(_env(x=2.0, y=0.5)) == pytest.approx(2.0 * math.e)


def test_subs_binds_a_variable() -> None:
    """Substituting t leaves a time-independent expression."""
    e = parse_expression("x + t**2").subs("t", 3.0)
    assert "t" not in e.variables()
    assert e.evaluate(_env(x=1.0)) == pytest.approx(10.0)


# ==========================================
# GRAMMAR VIOLATIONS
# ==========================================

@pytest.mark.parametrize("source", [
    "foo + 1",          # unknown name
    "x ** -1",          # negative exponent
    "x ** 1.5",         # non-integer exponent
    "x ** y",           # symbolic exponent
    "tan(x)",           # unsupported function
    "x if y else z",    # unsupported syntax
    "x +",              # syntax error
    "1 / 0",            # division by the constant zero
])
def test_rejected_expressions(source: str) -> None:
    """Everything outside the grammar raises ExpressionError."""
    with pytest.raises(ExpressionError):
        parse_expression(source)


def test_booleans_are_rejected() -> None:
    """JSON true/false must not slip through as 1/0."""
    with pytest.raises(ExpressionError):
        parse_expression(True)


def test_expression_error_is_a_config_error() -> None:
    """The CLI maps expression errors to the configuration exit code."""
    with pytest.raises(ConfigError):
        parse_expression("unknown_param * x")
