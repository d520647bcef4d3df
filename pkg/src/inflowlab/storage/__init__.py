"""
inflowlab Storage Package
=========================

Artifact persistence: versioned binary grid dumps, JSON reports, CSV
histories and gnuplot tables. Every write goes through a temporary file
that replaces the target atomically.
"""

__version__ = "0.1.0"

from .atomic import atomic_write_bytes, atomic_write_text, atomic_write_with
from .griddump import (
    GridDump,
    read_boundary,
    read_dump,
    read_grid,
    read_mask,
    write_boundary,
    write_grid,
    write_mask
)
from .reports import (
    dumps_report,
    read_history_csv,
    read_json,
    to_jsonable,
    write_gnuplot_table,
    write_history_csv,
    write_json
)

__all__ = [
    "atomic_write_bytes",
    "atomic_write_text",
    "atomic_write_with",
    "GridDump",
    "read_boundary",
    "read_dump",
    "read_grid",
    "read_mask",
    "write_boundary",
    "write_grid",
    "write_mask",
    "dumps_report",
    "read_history_csv",
    "read_json",
    "to_jsonable",
    "write_gnuplot_table",
    "write_history_csv",
    "write_json"
]
