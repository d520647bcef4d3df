"""
End-to-end tests for the run, verify, manufacture and report workflows on
small grids.
"""
import numpy as np
import pytest

# Internal package imports
from inflowlab.config import RUN_REPORT_SCHEMA_TAG
from inflowlab.constants import ExitCode
from inflowlab.core.exceptions import FormatError
from inflowlab.geometry.domain import Side
from inflowlab.pipeline import load_problem, manufacture, report, run, verify
from inflowlab.scenarios.runconfig import load_config
from inflowlab.storage.reports import read_history_csv, read_json
from tests.conftest import base_config

pytestmark = pytest.mark.integration


@pytest.fixture(name="zero_run", scope="module")
def fixture_zero_run(tmp_path_factory) -> tuple[str, ExitCode]:
    out = tmp_path_factory.mktemp("zero")
    code = run(load_config(base_config("zero")), str(out))
    return str(out), code


# ==========================================
# RUN
# ==========================================

def test_zero_run_passes(zero_run: tuple[str, ExitCode]) -> None:
    out, code = zero_run
    assert code == ExitCode.PASS

    doc = read_json(f"{out}/run_report.json", RUN_REPORT_SCHEMA_TAG)
    assert doc["passed"] is True and doc["exit_code"] == 0
    names = [c["name"] for c in doc["checks"]]
    assert names[:2] == ["boundary_trace", "initial_trace"]
    assert "gronwall" in names and names[-1] == "continuity"
    assert doc["manufactured_error"] is None


def test_zero_run_writes_artifacts(zero_run: tuple[str, ExitCode]) -> None:
    out, _ = zero_run
    metadata = read_json(f"{out}/metadata.json")
    assert [s["t"] for s in metadata["snapshots"]] == [0.0, 0.25, 0.5]
    assert metadata["snapshots"][1]["snapshot"] == "snapshot_001.bin"
    assert metadata["config"]["scenario"]["preset"] == "zero"

    columns, rows = read_history_csv(f"{out}/history_divergence.csv")
    assert columns[0] == "time"
    assert len(rows) == 3


def test_verify_reproduces_a_run(zero_run: tuple[str, ExitCode]) -> None:
    out, _ = zero_run
    assert verify(out) == ExitCode.PASS


def test_report_renders_tables(zero_run: tuple[str, ExitCode]) -> None:
    out, _ = zero_run
    assert report(out) == ExitCode.PASS
    text = open(f"{out}/report.txt", encoding="utf-8").read()
    assert "RUN REPORT: ZERO" in text
    assert "cond0" in text
    table = open(f"{out}/table_divergence.dat", encoding="utf-8").read().splitlines()
    assert table[0] == "# divergence"
    assert table[1].startswith("# t divergence")
    assert len(table) == 5


def test_mismatch_needs_expect_jump(tmp_path) -> None:
    """The negative control passes only when a jump is expected."""
    config = load_config(base_config("mismatch"))
    assert run(config, str(tmp_path / "plain")) == ExitCode.CHECK_FAILURE
    assert run(config, str(tmp_path / "jump"), expect_jump=True) == ExitCode.PASS

    doc = read_json(str(tmp_path / "jump" / "run_report.json"))
    assert doc["expect_jump"] is True
    assert np.linalg.norm(doc["jump_study"][0]["y_estimate"]) > 0.5


def test_json_only_output(tmp_path) -> None:
    config = load_config(base_config("uniform", output={"formats": ["json"]}))
    assert run(config, str(tmp_path)) == ExitCode.PASS
    assert (tmp_path / "run_report.json").is_file()
    assert not (tmp_path / "snapshot_000.bin").exists()
    assert not list(tmp_path.glob("history_*.csv"))


# ==========================================
# CORRUPTED RUNS
# ==========================================

def test_verify_rejects_a_truncated_dump(tmp_path) -> None:
    assert run(load_config(base_config("zero")), str(tmp_path)) == ExitCode.PASS
    dump = tmp_path / "snapshot_001.bin"
    dump.write_bytes(dump.read_bytes()[:-16])
    with pytest.raises(FormatError):
        verify(str(tmp_path))


def test_verify_needs_metadata(tmp_path) -> None:
    with pytest.raises(FileNotFoundError):
        verify(str(tmp_path))


def test_report_on_an_empty_directory(tmp_path) -> None:
    with pytest.raises(FileNotFoundError):
        report(str(tmp_path))


# ==========================================
# MANUFACTURE
# ==========================================

def test_manufacture_then_load(tmp_path) -> None:
    config = load_config(base_config("manufactured"))
    assert manufacture(config, str(tmp_path)) == ExitCode.PASS
    for name in ("problem.json", "inflow.bin", "initial.bin",
                 "forcing_000.bin", "forcing_002.bin", "exact_002.bin"):
        assert (tmp_path / name).is_file(), name

    problem = load_problem(str(tmp_path))
    assert problem.name == "manufactured@files"
    assert problem.T == 0.5
    assert problem.exact is not None

    domain = config.domain
    np.testing.assert_allclose(problem.H.on_wall(domain, 0.25),
                               config.problem.H.on_wall(domain, 0.25), atol=1e-12)
    wall = domain.boundary_nodes(Side.PLUS)
    np.testing.assert_allclose(problem.Y0.eval(0.0, wall),
                               config.problem.Y0.eval(0.0, wall), atol=1e-12)
