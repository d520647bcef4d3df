"""
Scenario Expression Language
============================

A small arithmetic language for analytic scenario data. Expressions are
parsed with Python's `ast` module into an immutable tree that can be
evaluated on numpy arrays and differentiated symbolically, so manufactured
data and the second-order compatibility residual get exact derivatives.

Grammar:
--------
* numbers, the variables `t, x, y, z`
* named constants: `pi`, the channel lengths `Lx, Ly, Lz` and any scenario
  parameter bound at parse time
* unary `+`/`-`, binary `+ - * /`, `**` with a non-negative integer literal
* `sin(.)`, `cos(.)`, `exp(.)`

Example:
    >>> e = parse_expression("kappa*x*sin(2*pi*y/Ly)", {"kappa": 0.5, "Ly": 1.0})
    >>> str(e.diff("x"))
"""
from __future__ import annotations

import ast
import math
from abc import ABC, abstractmethod
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Final

import numpy as np
from numpy.typing import ArrayLike, NDArray

from inflowlab.core.exceptions import ExpressionError

VARIABLES: Final[tuple[str, ...]] = ("t", "x", "y", "z")
FUNCTIONS: Final[tuple[str, ...]] = ("sin", "cos", "exp")

type Value = float | NDArray[np.float64]


class Expr(ABC):
    """Base node of the expression tree."""

    @abstractmethod
    def evaluate(self, env: Mapping[str, ArrayLike]) -> Value:
        """Evaluates the node with variables bound from `env`."""

    @abstractmethod
    def diff(self, var: str) -> Expr:
        """Symbolic partial derivative with respect to `var`."""

    @abstractmethod
    def subs(self, var: str, value: float) -> Expr:
        """Replaces variable `var` with a constant."""

    @abstractmethod
    def variables(self) -> frozenset[str]:
        """Free variables referenced by the node."""

    def is_zero(self) -> bool:
        return isinstance(self, Const) and self.value == 0.0


@dataclass(frozen=True)
class Const(Expr):
    value: float

    def evaluate(self, env: Mapping[str, ArrayLike]) -> Value:
        return self.value

    def diff(self, var: str) -> Expr:
        return ZERO

    def subs(self, var: str, value: float) -> Expr:
        return self

    def variables(self) -> frozenset[str]:
        return frozenset()

    def __str__(self) -> str:
        return repr(float(self.value))


@dataclass(frozen=True)
class Var(Expr):
    name: str

    def evaluate(self, env: Mapping[str, ArrayLike]) -> Value:
        return np.asarray(env[self.name], dtype=np.float64)

    def diff(self, var: str) -> Expr:
        return ONE if var == self.name else ZERO

    def subs(self, var: str, value: float) -> Expr:
        return Const(float(value)) if var == self.name else self

    def variables(self) -> frozenset[str]:
        return frozenset({self.name})

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr

    def evaluate(self, env: Mapping[str, ArrayLike]) -> Value:
        return self.left.evaluate(env) + self.right.evaluate(env)

    def diff(self, var: str) -> Expr:
        return add(self.left.diff(var), self.right.diff(var))

    def subs(self, var: str, value: float) -> Expr:
        return add(self.left.subs(var, value), self.right.subs(var, value))

    def variables(self) -> frozenset[str]:
        return self.left.variables() | self.right.variables()

    def __str__(self) -> str:
        return f"({self.left} + {self.right})"


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr

    def evaluate(self, env: Mapping[str, ArrayLike]) -> Value:
        return self.left.evaluate(env) - self.right.evaluate(env)

    def diff(self, var: str) -> Expr:
        return sub(self.left.diff(var), self.right.diff(var))

    def subs(self, var: str, value: float) -> Expr:
        return sub(self.left.subs(var, value), self.right.subs(var, value))

    def variables(self) -> frozenset[str]:
        return self.left.variables() | self.right.variables()

    def __str__(self) -> str:
        return f"({self.left} - {self.right})"


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr

    def evaluate(self, env: Mapping[str, ArrayLike]) -> Value:
        return self.left.evaluate(env) * self.right.evaluate(env)

    def diff(self, var: str) -> Expr:
        return add(mul(self.left.diff(var), self.right),
                   mul(self.left, self.right.diff(var)))

    def subs(self, var: str, value: float) -> Expr:
        return mul(self.left.subs(var, value), self.right.subs(var, value))

    def variables(self) -> frozenset[str]:
        return self.left.variables() | self.right.variables()

    def __str__(self) -> str:
        return f"({self.left} * {self.right})"


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr

    def evaluate(self, env: Mapping[str, ArrayLike]) -> Value:
        return self.left.evaluate(env) / self.right.evaluate(env)

    def diff(self, var: str) -> Expr:
        numerator = sub(mul(self.left.diff(var), self.right),
                        mul(self.left, self.right.diff(var)))
        return div(numerator, power(self.right, 2))

    def subs(self, var: str, value: float) -> Expr:
        return div(self.left.subs(var, value), self.right.subs(var, value))

    def variables(self) -> frozenset[str]:
        return self.left.variables() | self.right.variables()

    def __str__(self) -> str:
        return f"({self.left} / {self.right})"


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr

    def evaluate(self, env: Mapping[str, ArrayLike]) -> Value:
        return -self.operand.evaluate(env)

    def diff(self, var: str) -> Expr:
        return neg(self.operand.diff(var))

    def subs(self, var: str, value: float) -> Expr:
        return neg(self.operand.subs(var, value))

    def variables(self) -> frozenset[str]:
        return self.operand.variables()

    def __str__(self) -> str:
        return f"(-{self.operand})"


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int

    def evaluate(self, env: Mapping[str, ArrayLike]) -> Value:
        return self.base.evaluate(env) ** self.exponent

    def diff(self, var: str) -> Expr:
        return mul(mul(Const(float(self.exponent)), power(self.base, self.exponent - 1)),
                   self.base.diff(var))

    def subs(self, var: str, value: float) -> Expr:
        return power(self.base.subs(var, value), self.exponent)

    def variables(self) -> frozenset[str]:
        return self.base.variables()

    def __str__(self) -> str:
        return f"({self.base} ** {self.exponent})"


@dataclass(frozen=True)
class Func(Expr):
    name: str
    arg: Expr

    def evaluate(self, env: Mapping[str, ArrayLike]) -> Value:
        inner = self.arg.evaluate(env)
        match self.name:
            case "sin":
                return np.sin(inner)
            case "cos":
                return np.cos(inner)
            case _:
                return np.exp(inner)

    def diff(self, var: str) -> Expr:
        inner = self.arg.diff(var)
        match self.name:
            case "sin":
                outer = func("cos", self.arg)
            case "cos":
                outer = neg(func("sin", self.arg))
            case _:
                outer = self
        return mul(outer, inner)

    def subs(self, var: str, value: float) -> Expr:
        return func(self.name, self.arg.subs(var, value))

    def variables(self) -> frozenset[str]:
        return self.arg.variables()

    def __str__(self) -> str:
        return f"{self.name}({self.arg})"


ZERO: Final[Const] = Const(0.0)
ONE: Final[Const] = Const(1.0)


# ---------------------------------------------------------
# FOLDING CONSTRUCTORS
# ---------------------------------------------------------
def add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if b.is_zero():
        return a
    if a.is_zero():
        return neg(b)
    return Sub(a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if a.is_zero() or b.is_zero():
        return ZERO
    if a == ONE:
        return b
    if b == ONE:
        return a
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if isinstance(b, Const) and b.value == 0.0:
        raise ExpressionError("Division by the constant zero", key=str(a))
    if a.is_zero():
        return ZERO
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value / b.value)
    if b == ONE:
        return a
    return Div(a, b)


def neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.operand
    return Neg(a)


def power(a: Expr, n: int) -> Expr:
    if n == 0:
        return ONE
    if n == 1:
        return a
    if isinstance(a, Const):
        return Const(a.value ** n)
    return Pow(a, n)


def func(name: str, a: Expr) -> Expr:
    if isinstance(a, Const):
        match name:
            case "sin":
                return Const(math.sin(a.value))
            case "cos":
                return Const(math.cos(a.value))
            case _:
                return Const(math.exp(a.value))
    return Func(name, a)


# ---------------------------------------------------------
# PARSER
# ---------------------------------------------------------
_BINARY = {ast.Add: add, ast.Sub: sub, ast.Mult: mul, ast.Div: div}


def parse_expression(text: str | float | int,
                     constants: Mapping[str, float] | None = None) -> Expr:
    """
    Parses `text` into an expression tree.

    Args:
        text: Source expression, or a bare number.
        constants: Named constants bound at parse time (parameters, lengths).

    Returns:
        Expr: The folded expression tree.

    Raises:
        ExpressionError: For any syntax outside the grammar.
    """
    if isinstance(text, bool):
        raise ExpressionError("Booleans are not expressions", key=str(text))
    if isinstance(text, (int, float)):
        return Const(float(text))

    bound: dict[str, float] = {"pi": math.pi}
    if constants:
        bound.update({k: float(v) for k, v in constants.items()})

    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as e:
        raise ExpressionError(f"Unparsable expression '{text}': {e.msg}",
                              key=text) from e
    return _convert(tree.body, bound, text)


def _convert(node: ast.AST, bound: Mapping[str, float], source: str) -> Expr:
    match node:
        case ast.Constant(value=value) if isinstance(value, (int, float)) \
                and not isinstance(value, bool):
            return Const(float(value))
        case ast.Name(id=name):
            if name in VARIABLES:
                return Var(name)
            if name in bound:
                return Const(bound[name])
            raise ExpressionError(f"Unknown name '{name}' in '{source}'", key=name)
        case ast.UnaryOp(op=ast.USub(), operand=operand):
            return neg(_convert(operand, bound, source))
        case ast.UnaryOp(op=ast.UAdd(), operand=operand):
            return _convert(operand, bound, source)
        case ast.BinOp(left=left, op=ast.Pow(), right=right):
            exponent = _convert(right, bound, source)
            if not isinstance(exponent, Const) or exponent.value < 0 \
                    or exponent.value != int(exponent.value):
                raise ExpressionError(
                    f"Exponent must be a non-negative integer in '{source}'",
                    key=ast.unparse(right))
            return power(_convert(left, bound, source), int(exponent.value))
        case ast.BinOp(left=left, op=op, right=right) if type(op) in _BINARY:
            return _BINARY[type(op)](_convert(left, bound, source),
                                     _convert(right, bound, source))
        case ast.Call(func=ast.Name(id=name), args=[arg], keywords=[]) \
                if name in FUNCTIONS:
            return func(name, _convert(arg, bound, source))
        case _:
            token = ast.unparse(node) if isinstance(node, ast.expr) else type(node).__name__
            raise ExpressionError(f"Unsupported syntax '{token}' in '{source}'",
                                  key=token)
