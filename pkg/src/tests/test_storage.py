"""
Tests for the grid dump codec and the JSON / CSV / gnuplot report writers.
"""
import json
import math

import numpy as np
import pytest

# Internal package imports
from inflowlab.config import GRID_DUMP_SCHEMA_TAG
from inflowlab.core.exceptions import FormatError
from inflowlab.geometry.boundary import AnalyticBoundary, BoundaryField
from inflowlab.geometry.domain import ChannelDomain, GridVectorField
from inflowlab.geometry.fields import ExpressionField
from inflowlab.storage.griddump import (
    read_boundary,
    read_dump,
    read_grid,
    read_mask,
    write_boundary,
    write_grid,
    write_mask
)
from inflowlab.storage.reports import (
    dumps_report,
    read_history_csv,
    read_json,
    to_jsonable,
    write_gnuplot_table,
    write_history_csv,
    write_json
)

GRID = ChannelDomain(Nx=8, Ny=4, Nz=4, Lx=2.0)


def _field(t: float = 0.25) -> GridVectorField:
    rng = np.random.default_rng(3)
    return GridVectorField(GRID, rng.standard_normal((3, *GRID.shape)), t)


def _split(path) -> tuple[dict, bytes]:
    raw = path.read_bytes()
    head, _, body = raw.partition(b"\n")
    return json.loads(head), body


def _rewrite(path, header: dict, body: bytes) -> None:
    path.write_bytes((json.dumps(header) + "\n").encode("utf-8") + body)


# ==========================================
# GRID DUMPS
# ==========================================

def test_grid_dump_round_trip(tmp_path) -> None:
    path = tmp_path / "Y_t0.25.bin"
    field = _field()
    write_grid(str(path), field)

    header, body = _split(path)
    assert header["schema"] == GRID_DUMP_SCHEMA_TAG
    assert header["kind"] == "grid" and header["components"] == 3
    assert len(body) == 3 * 9 * 4 * 4 * 8

    back = read_grid(str(path))
    assert back.t == 0.25
    assert back.domain.Lx == 2.0 and back.domain.shape == GRID.shape
    np.testing.assert_array_equal(back.values, field.values)


def test_grid_payload_is_x1_fastest(tmp_path) -> None:
    """The first Nx+1 payload entries walk along x1 for component 0."""
    path = tmp_path / "Y.bin"
    field = _field()
    write_grid(str(path), field)
    _, body = _split(path)
    first = np.frombuffer(body[:9 * 8], dtype="<f8")
    np.testing.assert_array_equal(first, field.values[0, :, 0, 0])


def test_mask_dump_round_trip(tmp_path) -> None:
    path = tmp_path / "mask.bin"
    region = np.ones(GRID.shape, dtype=np.int8)
    region[5:] = -1
    region[4] = 0
    phi = np.linspace(-1.0, 1.0, np.prod(GRID.shape)).reshape(GRID.shape)
    write_mask(str(path), GRID, 0.5, region, phi)

    t, labels, back_phi = read_mask(str(path))
    assert t == 0.5
    assert labels.dtype == np.int8
    np.testing.assert_array_equal(labels, region)
    np.testing.assert_array_equal(back_phi, phi)


def test_boundary_dump_round_trip(tmp_path) -> None:
    source = AnalyticBoundary(ExpressionField.parse(["1 + t", "0.1 * sin(2 * pi * y)", "z"]))
    boundary = BoundaryField.sample(source, GRID, [0.0, 0.5, 1.0])
    path = tmp_path / "H.bin"
    write_boundary(str(path), boundary)

    back = read_boundary(str(path))
    np.testing.assert_array_equal(back.times, boundary.times)
    np.testing.assert_array_equal(back.values, boundary.values)
    np.testing.assert_array_equal(back.dt_values, boundary.dt_values)
    assert (back.dtt_values is None) == (boundary.dtt_values is None)


def test_reading_the_wrong_kind(tmp_path) -> None:
    path = tmp_path / "Y.bin"
    write_grid(str(path), _field())
    with pytest.raises(FormatError):
        read_mask(str(path))
    with pytest.raises(FormatError):
        read_boundary(str(path))


# ==========================================
# CORRUPTED DUMPS
# ==========================================

def test_missing_dump(tmp_path) -> None:
    with pytest.raises(FileNotFoundError):
        read_dump(str(tmp_path / "absent.bin"))


def test_truncated_payload(tmp_path) -> None:
    path = tmp_path / "Y.bin"
    write_grid(str(path), _field())
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(FormatError):
        read_grid(str(path))


def test_header_without_newline(tmp_path) -> None:
    path = tmp_path / "Y.bin"
    path.write_bytes(b'{"schema": "inflowlab.griddump/1"}')
    with pytest.raises(FormatError):
        read_dump(str(path))


@pytest.mark.parametrize("key, value", [
    ("schema", "inflowlab.griddump/0"),
    ("kind", "velocity"),
])
def test_header_values_are_checked(tmp_path, key: str, value: str) -> None:
    path = tmp_path / "Y.bin"
    write_grid(str(path), _field())
    header, body = _split(path)
    header[key] = value
    _rewrite(path, header, body)
    with pytest.raises(FormatError):
        read_dump(str(path))


def test_header_must_carry_required_keys(tmp_path) -> None:
    path = tmp_path / "Y.bin"
    write_grid(str(path), _field())
    header, body = _split(path)
    del header["Nz"]
    _rewrite(path, header, body)
    with pytest.raises(FormatError):
        read_dump(str(path))


def test_header_must_be_an_object(tmp_path) -> None:
    path = tmp_path / "Y.bin"
    path.write_bytes(b"[1, 2, 3]\n")
    with pytest.raises(FormatError):
        read_dump(str(path))


def test_non_finite_payload(tmp_path) -> None:
    path = tmp_path / "Y.bin"
    write_grid(str(path), _field())
    header, body = _split(path)
    nan = np.array([np.nan], dtype="<f8").tobytes()
    _rewrite(path, header, nan + body[8:])
    with pytest.raises(FormatError):
        read_grid(str(path))


# ==========================================
# JSON REPORTS
# ==========================================

def test_to_jsonable_unwraps_numpy() -> None:
    doc = to_jsonable({"a": np.float64(1.5), "b": np.arange(3), "c": np.bool_(True),
                       "d": (np.int64(2), math.inf), 5: float("nan")})
    assert doc == {"a": 1.5, "b": [0, 1, 2], "c": True, "d": [2, None], "5": None}
    assert isinstance(doc["b"][0], int)


def test_dumps_report_is_sorted_and_strict() -> None:
    text = dumps_report({"z": 1, "a": np.nan})
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"z"')
    assert json.loads(text) == {"a": None, "z": 1}


def test_json_report_round_trip(tmp_path) -> None:
    path = tmp_path / "report.json"
    write_json(str(path), {"schema": "inflowlab.test/1", "values": np.array([1.0, 2.0])})
    assert read_json(str(path), schema="inflowlab.test/1")["values"] == [1.0, 2.0]
    with pytest.raises(FormatError):
        read_json(str(path), schema="inflowlab.other/1")


@pytest.mark.parametrize("content", ["{not json", "[1, 2]"])
def test_read_json_rejects_bad_documents(tmp_path, content: str) -> None:
    path = tmp_path / "report.json"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(FormatError):
        read_json(str(path))


# ==========================================
# HISTORY TABLES
# ==========================================

def test_history_csv_round_trip(tmp_path) -> None:
    path = tmp_path / "history.csv"
    write_history_csv(str(path), ["time", "value"], [[0.0, 1.5], [0.5, None]])
    assert path.read_text(encoding="utf-8").splitlines()[2] == "0.5,nan"

    columns, rows = read_history_csv(str(path))
    assert columns == ["time", "value"]
    assert rows[0] == [0.0, 1.5]
    assert math.isnan(rows[1][1])


@pytest.mark.parametrize("content", ["", "time,value\n0.0,abc\n", "time,value\n0.0\n"])
def test_history_csv_rejects_bad_files(tmp_path, content: str) -> None:
    path = tmp_path / "history.csv"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(FormatError):
        read_history_csv(str(path))


def test_gnuplot_table(tmp_path) -> None:
    path = tmp_path / "history.dat"
    write_gnuplot_table(str(path), ["time", "energy"], [[0.0, 1.0], [0.5, None]],
                        title="energy history")
    assert path.read_text(encoding="utf-8").splitlines() == [
        "# energy history",
        "# time energy",
        "0.0 1.0",
        "0.5 nan",
    ]
