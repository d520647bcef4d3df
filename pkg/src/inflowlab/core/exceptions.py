"""
Custom Exceptions for inflowlab
===============================
Centralized error types for configuration, scenario data, numerics and
artifact formats.
"""
from typing import Any, Optional


class InflowLabError(Exception):
    """
    Base class for all exceptions in the inflowlab package.

    Attributes:
        message (str): Explanation of the error.
        key (str, optional): Config key or operation the error refers to.
        time (float, optional): Simulation time at which it was detected.
        point (Any, optional): Offending point, node or sample.
    """
    def __init__(self, message: str,
                 key: Optional[str] = None,
                 time: Optional[float] = None,
                 point: Optional[Any] = None):
        self.message = message
        self.key = key
        self.time = time
        self.point = point

        full_msg = message
        if key:
            full_msg += f" [Key: {key}]"
        if time is not None:
            full_msg += f" [Time: {time:.6g}]"
        if point is not None:
            full_msg += f" [Point: {point}]"

        super().__init__(full_msg)


# ---------------------------------------------------------
# CONFIGURATION
# ---------------------------------------------------------
class ConfigError(InflowLabError):
    """Schema or semantic violation in a run configuration."""


class ExpressionError(ConfigError):
    """An expression uses syntax outside the supported grammar."""


# ---------------------------------------------------------
# SCENARIO DATA
# ---------------------------------------------------------
class DataError(InflowLabError):
    """Scenario data violates a structural requirement."""


class SignConditionError(DataError):
    """Velocity is not strictly inflowing on Γ₊ or outflowing on Γ₋."""


class DataCoverageError(DataError):
    """Requested sample time or derivative is not covered by the data."""


class NotInRangeError(DataError):
    """A field is not in the range of the curl (divergence or flux)."""


class IncompatibleFluxError(DataError):
    """Boundary normal velocity does not balance between Γ₊ and Γ₋."""


class FormulaInapplicableError(DataError):
    """A closed-form prediction was requested outside its hypotheses."""


class CapabilityError(InflowLabError):
    """A provider cannot supply the requested derivative."""


# ---------------------------------------------------------
# NUMERICS
# ---------------------------------------------------------
class NumericError(InflowLabError):
    """Non-finite state or solver breakdown."""


class IntegrationDomainError(NumericError):
    """A trajectory left the slab on which the velocity is evaluable."""


class NearTangencyError(NumericError):
    """|Uⁿ| fell below the tangency threshold."""


class QuadratureError(NumericError):
    """Too few quadrature nodes for the requested rule."""


class StepLimitError(NumericError):
    """The step-count cap was exceeded."""


# ---------------------------------------------------------
# GEOMETRY AND FORMATS
# ---------------------------------------------------------
class GeometryError(InflowLabError):
    """Invalid domain parameters or geometric preconditions."""


class OutOfDomainError(GeometryError):
    """A point lies outside the closure of the channel."""


class FormatError(InflowLabError):
    """Corrupted, truncated or unversioned artifact."""


class TestFunctionError(InflowLabError):
    """A weak-form test function is not compactly supported in Q."""
    __test__ = False
