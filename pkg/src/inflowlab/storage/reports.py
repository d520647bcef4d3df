"""
Report Writers
==============

JSON reports with sorted keys (non-finite floats become null), CSV
histories with a `time,...` header row, and whitespace-separated tables
with a `#` header for gnuplot.
"""
from __future__ import annotations

import csv
import json
import math
from collections.abc import Mapping, Sequence
from typing import IO, Any

import numpy as np

from inflowlab.config import ENCODING_TYPE, JsonDict
from inflowlab.core.exceptions import FormatError
from inflowlab.storage.atomic import atomic_write_text, atomic_write_with
from inflowlab.utils.det_encoding import detect_encoding, is_utf8_compatible
from inflowlab.utils.logger import get_logger

log = get_logger(__name__)


def to_jsonable(obj: Any) -> Any:
    """Plain-Python copy of `obj` with numpy scalars/arrays unwrapped and NaN/inf as None."""
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    return obj


def dumps_report(report: Mapping[str, Any]) -> str:
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path: str, report: Mapping[str, Any]) -> None:
    atomic_write_text(path, dumps_report(report))
    log.debug("Report written: %s", path)


def read_json(path: str, schema: str | None = None) -> JsonDict:
    """
    Loads a UTF-8 JSON report, optionally insisting on its schema tag.

    Raises:
        FileNotFoundError: The report does not exist.
        FormatError: Not UTF-8, not a JSON object, or a different schema.
    """
    encoding = detect_encoding(path)
    if not is_utf8_compatible(encoding):
        raise FormatError(f"Report is not UTF-8 (detected {encoding})", key=path)
    with open(path, "r", encoding=ENCODING_TYPE) as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise FormatError(f"Report is not valid JSON: {e}", key=path) from e
    if not isinstance(data, dict):
        raise FormatError("Report must be a JSON object", key=path)
    if schema is not None and data.get("schema") != schema:
        raise FormatError(f"Expected schema {schema!r}, found {data.get('schema')!r}",
                          key=path)
    return data


def _cell(value: Any) -> str:
    if value is None:
        return "nan"
    return repr(float(value))


def write_history_csv(path: str, columns: Sequence[str],
                      rows: Sequence[Sequence[float | None]]) -> None:
    def emit(f: IO[Any]) -> None:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    atomic_write_with(path, emit)


def read_history_csv(path: str) -> tuple[list[str], list[list[float]]]:
    """
    Raises:
        FormatError: Empty file or ragged rows.
    """
    with open(path, "r", encoding=ENCODING_TYPE, newline="") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise FormatError("History file is empty", key=path)
    header, body = rows[0], rows[1:]
    try:
        values = [[float(c) for c in r] for r in body]
    except ValueError as e:
        raise FormatError(f"Non-numeric history entry: {e}", key=path) from e
    if any(len(r) != len(header) for r in values):
        raise FormatError("History rows do not match the header", key=path)
    return header, values


def write_gnuplot_table(path: str, columns: Sequence[str],
                        rows: Sequence[Sequence[float | None]], title: str = "") -> None:
    lines = []
    if title:
        lines.append(f"# {title}")
    lines.append("# " + " ".join(columns))
    lines.extend(" ".join(_cell(v) for v in row) for row in rows)
    atomic_write_text(path, "\n".join(lines) + "\n")
