"""
Grid Dump Format
================

Binary dumps of grid fields, region masks and sampled inflow data.

Layout:
-------
* Header: a single UTF-8 JSON line (terminated by ``\\n``) with keys
  `schema`, `kind` (grid | mask | boundary), `Nx`, `Ny`, `Nz`, `Lx`, `Ly`,
  `Lz`, `t` and `components`. Boundary dumps add `times` and `fields`.
* Payload: little-endian float64, component-major with x1 fastest
  (Fortran order inside each component). Boundary payloads are
  time-major, then field, then component, with y fastest.

Readers reject unknown schema tags, payload sizes that disagree with the
header and non-finite grid values with a FormatError.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Final

import numpy as np
from numpy.typing import NDArray

from inflowlab.config import ENCODING_TYPE, GRID_DUMP_SCHEMA_TAG, JsonDict
from inflowlab.core.exceptions import DataError, FormatError, GeometryError, NumericError
from inflowlab.geometry.boundary import BoundaryField
from inflowlab.geometry.domain import ChannelDomain, FloatArray, GridVectorField
from inflowlab.storage.atomic import atomic_write_bytes
from inflowlab.utils.det_encoding import detect_bytes_encoding, is_utf8_compatible
from inflowlab.utils.logger import get_logger

log = get_logger(__name__)

PAYLOAD_DTYPE: Final = np.dtype("<f8")
KINDS: Final = ("grid", "mask", "boundary")
_REQUIRED: Final = ("schema", "kind", "Nx", "Ny", "Nz", "Lx", "Ly", "Lz", "t", "components")
_BOUNDARY_FIELDS: Final = ("values", "dt_values", "dtt_values")


@dataclass(frozen=True, eq=False)
class GridDump:
    """A parsed dump: its header and the raw payload."""
    header: JsonDict
    payload: FloatArray

    @property
    def domain(self) -> ChannelDomain:
        try:
            return ChannelDomain.from_dict(self.header)
        except GeometryError as e:
            raise FormatError(f"Dump header describes an invalid grid: {e.message}",
                              key="header") from e

    @property
    def kind(self) -> str:
        return str(self.header["kind"])


def _header(domain: ChannelDomain, kind: str, t: float, components: int,
            **extra: Any) -> bytes:
    head = {"schema": GRID_DUMP_SCHEMA_TAG, "kind": kind, **domain.to_dict(),
            "t": float(t), "components": int(components), **extra}
    return (json.dumps(head, sort_keys=True) + "\n").encode(ENCODING_TYPE)


def _grid_payload(values: FloatArray) -> bytes:
    """(C, Nx+1, Ny, Nz) -> component-major, x1-fastest little-endian bytes."""
    flat = np.concatenate([np.ravel(c, order="F") for c in values])
    return flat.astype(PAYLOAD_DTYPE).tobytes()


# ---------------------------------------------------------
# WRITERS
# ---------------------------------------------------------
def write_grid(path: str, field: GridVectorField) -> None:
    atomic_write_bytes(path, _header(field.domain, "grid", field.t, 3)
                       + _grid_payload(field.values))


def write_mask(path: str, domain: ChannelDomain, t: float,
               region: NDArray[np.int8], phi: FloatArray) -> None:
    """Region labels (as floats) and φ as a two-component dump."""
    values = np.stack([np.asarray(region, dtype=np.float64), np.asarray(phi)])
    atomic_write_bytes(path, _header(domain, "mask", t, 2) + _grid_payload(values))


def write_boundary(path: str, boundary: BoundaryField) -> None:
    """Samples of H (and whichever time derivatives it carries) on Γ₊."""
    present = [name for name in _BOUNDARY_FIELDS if getattr(boundary, name) is not None]
    stack = np.stack([getattr(boundary, name) for name in present], axis=1)
    times = [float(t) for t in boundary.times]
    head = _header(boundary.domain, "boundary", times[0], 3 * len(present),
                   times=times, fields=present)
    payload = np.ravel(np.swapaxes(stack, -1, -2)).astype(PAYLOAD_DTYPE).tobytes()
    atomic_write_bytes(path, head + payload)


# ---------------------------------------------------------
# READERS
# ---------------------------------------------------------
def read_dump(path: str) -> GridDump:
    """
    Parses any dump kind.

    Raises:
        FileNotFoundError: The dump does not exist.
        FormatError: Corrupted header, unknown schema or size mismatch.
    """
    with open(path, "rb") as f:
        raw_header = f.readline()
        body = f.read()
    if not raw_header.endswith(b"\n"):
        raise FormatError("Dump has no header line", key=path)
    if not is_utf8_compatible(detect_bytes_encoding(raw_header)):
        raise FormatError("Dump header is not UTF-8", key=path)
    try:
        header = json.loads(raw_header.decode(ENCODING_TYPE))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise FormatError(f"Dump header is not valid JSON: {e}", key=path) from e
    if not isinstance(header, dict):
        raise FormatError("Dump header must be a JSON object", key=path)
    missing = [k for k in _REQUIRED if k not in header]
    if missing:
        raise FormatError(f"Dump header lacks {', '.join(missing)}", key=path)
    if header["schema"] != GRID_DUMP_SCHEMA_TAG:
        raise FormatError(f"Unsupported dump schema {header['schema']!r}", key=path)
    if header["kind"] not in KINDS:
        raise FormatError(f"Unknown dump kind {header['kind']!r}", key=path)

    ny, nz, comps = int(header["Ny"]), int(header["Nz"]), int(header["components"])
    if header["kind"] == "boundary":
        expected = len(header.get("times", [])) * comps * ny * nz
    else:
        expected = comps * (int(header["Nx"]) + 1) * ny * nz
    if len(body) != expected * PAYLOAD_DTYPE.itemsize:
        raise FormatError(f"Payload holds {len(body)} bytes, header implies "
                          f"{expected * PAYLOAD_DTYPE.itemsize}", key=path)
    payload = np.frombuffer(body, dtype=PAYLOAD_DTYPE).astype(np.float64)
    return GridDump(header, payload)


def _grid_values(dump: GridDump) -> FloatArray:
    dom = dump.domain
    comps = int(dump.header["components"])
    parts = dump.payload.reshape(comps, -1)
    return np.stack([np.reshape(p, dom.shape, order="F") for p in parts])


def _expect(dump: GridDump, kind: str, path: str) -> None:
    if dump.kind != kind:
        raise FormatError(f"Expected a {kind} dump, found {dump.kind}", key=path)


def read_grid(path: str) -> GridVectorField:
    """
    Raises:
        FormatError: Wrong kind, component count or non-finite values.
    """
    dump = read_dump(path)
    _expect(dump, "grid", path)
    if int(dump.header["components"]) != 3:
        raise FormatError("Grid dumps carry exactly 3 components", key=path)
    if not np.all(np.isfinite(dump.payload)):
        raise FormatError("Grid dump contains non-finite values", key=path)
    field = GridVectorField(dump.domain, _grid_values(dump), float(dump.header["t"]))
    log.debug("Read grid dump %s (t=%.6g)", path, field.t)
    return field


def read_mask(path: str) -> tuple[float, NDArray[np.int8], FloatArray]:
    """(t, region labels, φ) of a mask dump."""
    dump = read_dump(path)
    _expect(dump, "mask", path)
    if int(dump.header["components"]) != 2:
        raise FormatError("Mask dumps carry exactly 2 components", key=path)
    values = _grid_values(dump)
    return float(dump.header["t"]), values[0].astype(np.int8), values[1]


def read_boundary(path: str, coverage_tol: float = 0.0) -> BoundaryField:
    """Rebuilds a BoundaryField from a boundary dump."""
    dump = read_dump(path)
    _expect(dump, "boundary", path)
    fields = list(dump.header.get("fields", ["values"]))
    times = [float(t) for t in dump.header["times"]]
    dom = dump.domain
    if not fields or fields[0] != "values" or 3 * len(fields) != int(dump.header["components"]):
        raise FormatError("Boundary dump fields disagree with its component count", key=path)
    stack = dump.payload.reshape(len(times), len(fields), 3, dom.Nz, dom.Ny)
    stack = np.swapaxes(stack, -1, -2)
    arrays = {name: stack[:, k] for k, name in enumerate(fields)}
    try:
        return BoundaryField(dom, times, arrays["values"], arrays.get("dt_values"),
                             arrays.get("dtt_values"), coverage_tol)
    except (DataError, NumericError) as e:
        raise FormatError(f"Boundary dump is inconsistent: {e.message}", key=path) from e
