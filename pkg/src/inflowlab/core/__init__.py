"""
inflowlab Core Package
======================

The exception hierarchy shared by every module and the scenario expression
language used for analytic data.
"""

__version__ = "0.1.0"

from .exceptions import (
    InflowLabError,
    ConfigError,
    ExpressionError,
    DataError,
    SignConditionError,
    DataCoverageError,
    NotInRangeError,
    IncompatibleFluxError,
    FormulaInapplicableError,
    CapabilityError,
    NumericError,
    IntegrationDomainError,
    NearTangencyError,
    QuadratureError,
    StepLimitError,
    GeometryError,
    OutOfDomainError,
    FormatError,
    TestFunctionError
)
from .expressions import Expr, parse_expression

__all__ = [
    "InflowLabError",
    "ConfigError",
    "ExpressionError",
    "DataError",
    "SignConditionError",
    "DataCoverageError",
    "NotInRangeError",
    "IncompatibleFluxError",
    "FormulaInapplicableError",
    "CapabilityError",
    "NumericError",
    "IntegrationDomainError",
    "NearTangencyError",
    "QuadratureError",
    "StepLimitError",
    "GeometryError",
    "OutOfDomainError",
    "FormatError",
    "TestFunctionError",
    "Expr",
    "parse_expression"
]
