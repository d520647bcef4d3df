"""
inflowlab Utilities Package
===========================

Shared helpers used across the solver, the report writers and the CLI.

Core Capabilities:
------------------
* Logging: timestamped file plus console logging with run-time console
  level control.
* Formatting: consistent headers, status markers and check lines for
  console summaries.
* Encoding: chardet-based detection used to insist on UTF-8 inputs.
"""

__version__ = "0.1.0"
__date__ = "2026-10-18"

from .logger import get_logger, set_console_level
from .formatting import (
    format_header,
    format_list_item,
    format_error,
    format_status,
    format_value,
    format_point,
    check_msg,
    completion_msg
)
from .det_encoding import (
    detect_encoding,
    detect_bytes_encoding,
    is_utf8_compatible
)

__all__ = [
    "get_logger",
    "set_console_level",
    "format_header",
    "format_list_item",
    "format_error",
    "format_status",
    "format_value",
    "format_point",
    "check_msg",
    "completion_msg",
    "detect_encoding",
    "detect_bytes_encoding",
    "is_utf8_compatible"
]
