"""
Console Output Formatting Utilities
"""

# Standardized Symbols
BULLET = "  • "
SUCCESS_MARK = "✅ "
ISSUE_MARK = "⚠️ "
CRITICAL_MARK = "❌ "


def format_header(title: str, width: int = 60) -> str:
    """Creates a consistent, centered header block for reports."""
    line = "=" * width
    return f"\n{line}\n {title.upper()}\n{line}"


def format_list_item(content: str) -> str:
    """Returns a string prefixed with the standard bullet."""
    return f"{BULLET}{content}"


def format_error(msg: str) -> str:
    """Returns a string prefixed with the critical error marker."""
    return f"{CRITICAL_MARK}{msg}"


def format_status(msg: str, success: bool = True) -> str:
    """Prefixes a message with a success or warning marker."""
    mark = SUCCESS_MARK if success else ISSUE_MARK
    return f"{mark}{msg}"


def format_value(name: str, value: float, unit: str = "") -> str:
    """
    Standardizes numeric report lines.
    Example: cond1 = 1.118034e+00
    """
    suffix = f" {unit}" if unit else ""
    return f"{name} = {value:.6e}{suffix}"


def format_point(point: tuple[float, ...]) -> str:
    """Standardizes point output as (x1, x2, x3)."""
    return "(" + ", ".join(f"{c:.6g}" for c in point) + ")"


def check_msg(name: str, value: float, tolerance: float, passed: bool) -> str:
    """
    Standardizes acceptance-check reporting.
    Example: ✅ cond0: 0.000000e+00 <= 1.000000e-08 (Passed)
    """
    mark = SUCCESS_MARK if passed else ISSUE_MARK
    status = "Passed" if passed else "Failed"
    relation = "<=" if passed else ">"
    return f"{mark}{name}: {value:.6e} {relation} {tolerance:.6e} ({status})"


def completion_msg(action: str, count: int, target: str = "") -> str:
    """
    Standardizes completion messages.
    Example: ✅ Solve complete: 3 snapshots written to runs/latest.
    """
    where = f" written to {target}" if target else ""
    return f"{SUCCESS_MARK}{action} complete: {count} items{where}."
