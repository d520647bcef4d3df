"""
Run Pipeline
============

The end-to-end workflows behind the CLI subcommands.

Workflows:
----------
* run: solve at the snapshot times, evaluate the compatibility suite and
  the diagnostics, optionally recover the velocity, write every artifact
  and grade the acceptance checks.
* verify: rebuild a run from its metadata and dumps, recompute the compat
  and diagnostics reports and compare them with the stored ones.
* manufacture: write the data of a configured problem as dump files.
* report: render the JSON reports of a run directory as text and as
  gnuplot tables.

Each workflow returns an ExitCode; errors propagate to the caller.
"""
from __future__ import annotations

import os
from collections.abc import Sequence
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np

from inflowlab.compat.conditions import CompatReport, compat_report
from inflowlab.config import (
    COMPAT_SCHEMA_TAG,
    DIAGNOSTICS_SCHEMA_TAG,
    METADATA_SCHEMA_TAG,
    RUN_REPORT_SCHEMA_TAG,
    JsonDict
)
from inflowlab.constants import ExitCode, Region
from inflowlab.core.exceptions import DataError, FormatError, NotInRangeError
from inflowlab.curltools.velocity import recover_velocity_and_pressure
from inflowlab.diagnostics.report import DiagnosticsReport, diagnose
from inflowlab.diagnostics.residuals import BumpTestFunction
from inflowlab.entry.regions import surface_root
from inflowlab.geometry.boundary import BoundaryField
from inflowlab.geometry.domain import ChannelDomain, Side
from inflowlab.geometry.fields import GriddedField
from inflowlab.paths import (
    COMPAT_FILENAME,
    DIAGNOSTICS_FILENAME,
    EXACT_PATTERN,
    FORCING_PATTERN,
    HISTORY_PATTERN,
    INFLOW_FILENAME,
    INITIAL_FILENAME,
    METADATA_FILENAME,
    PROBLEM_FILENAME,
    REGIONS_PATTERN,
    REPORT_TEXT_FILENAME,
    RUN_REPORT_FILENAME,
    SNAPSHOT_PATTERN,
    TABLE_PATTERN
)
from inflowlab.scenarios.presets import forcing_velocity
from inflowlab.scenarios.runconfig import RunConfig, load_config
from inflowlab.storage.atomic import atomic_write_text
from inflowlab.storage.griddump import (
    read_boundary,
    read_grid,
    read_mask,
    write_boundary,
    write_grid,
    write_mask
)
from inflowlab.storage.reports import (
    dumps_report,
    read_json,
    write_gnuplot_table,
    write_history_csv,
    write_json
)
from inflowlab.transport.problem import ProblemData
from inflowlab.transport.solution import LagrangianSolver
from inflowlab.transport.solve import LagrangianField, solve
from inflowlab.utils.formatting import (
    check_msg,
    completion_msg,
    format_header,
    format_list_item,
    format_point,
    format_status
)
from inflowlab.utils.logger import get_logger

log = get_logger(__name__)


@dataclass(frozen=True)
class CheckResult:
    """One graded acceptance check. Unenforced checks never fail a run."""
    name: str
    value: float | None
    tol: float
    passed: bool
    enforced: bool = True
    note: str = ""

    def to_dict(self) -> JsonDict:
        return asdict(self)


# ---------------------------------------------------------
# DEFAULT PROBES
# ---------------------------------------------------------
def _centre_line_root(data: ProblemData, domain: ChannelDomain, t: float,
                      config: RunConfig) -> np.ndarray | None:
    try:
        return surface_root(data.u, t, 0.5 * domain.Ly, 0.5 * domain.Lz,
                            config.settings().ode_step, domain.Lx)
    except DataError as e:
        log.debug("No S(t) crossing on the centre line: %s", e)
        return None


def default_test_function(data: ProblemData, domain: ChannelDomain,
                          config: RunConfig) -> BumpTestFunction:
    """
    A bump centred at T/2 on S(T/2) along the channel centre line (or the
    channel midpoint when S has left), well inside Q.
    """
    T = config.T
    t0 = 0.5 * T
    root = _centre_line_root(data, domain, t0, config)
    c1 = 0.5 * domain.Lx if root is None else float(root[0])
    if not 0.0 < c1 < domain.Lx:
        c1 = 0.5 * domain.Lx
    radii = (0.45 * min(t0, T - t0), 0.45 * min(c1, domain.Lx - c1),
             0.25 * domain.Ly, 0.25 * domain.Lz)
    return BumpTestFunction((t0, c1, 0.5 * domain.Ly, 0.5 * domain.Lz), radii, (1.0, 1.0, 1.0))


def default_jump_points(data: ProblemData, domain: ChannelDomain,
                        config: RunConfig) -> list[tuple[float, tuple[float, float, float]]]:
    """The centre-line point of S(T/2), when S(T/2) is inside the channel."""
    t0 = 0.5 * config.T
    root = _centre_line_root(data, domain, t0, config)
    if root is None:
        return []
    reach = max(config.checks["jump_offsets"]) * config.settings().ode_step
    if not reach < root[0] < domain.Lx - reach:
        log.info("S(T/2) is too close to a wall for the jump study")
        return []
    return [(t0, (float(root[0]), float(root[1]), float(root[2])))]


# ---------------------------------------------------------
# SHARED ANALYSIS
# ---------------------------------------------------------
def _compat(config: RunConfig) -> CompatReport:
    return compat_report(config.problem, config.domain, config.check_tol,
                         times=config.snapshot_times)


def _diagnostics(config: RunConfig, field: LagrangianField) -> DiagnosticsReport:
    """
    Diagnostics of a solved field. The solver is used for point evaluation
    only while a single segment covers the run.
    """
    data, domain, checks = config.problem, config.domain, config.checks
    settings = config.settings()
    single = len(field.metadata.get("segments", [])) <= 1
    solver = LagrangianSolver(data, domain, settings) if single else None
    tests = [default_test_function(data, domain, config)] if checks["weak_residual"] else []
    jump_points = default_jump_points(data, domain, config) if single else []
    report = diagnose(
        field, data,
        solver=solver,
        tests=tests,
        jump_points=jump_points,
        jump_offsets=[float(k) * settings.ode_step for k in checks["jump_offsets"]],
        alpha=float(checks["holder_alpha"]),
        pair_budget=int(checks["holder_pairs"]),
        seed=config.seed,
        strong_band=float(config.tolerances["strong_band"]),
        energy=config.preset == "zero")
    if not single:
        report.notes.append("restarted run: weak residual from interpolated snapshots, "
                            "jump study skipped")
    return report


# ---------------------------------------------------------
# CHECKS
# ---------------------------------------------------------
def _trace_checks(field: LagrangianField, data: ProblemData, tol: float) -> list[CheckResult]:
    """Y = H on Plus nodes of Γ₊ for t > 0, and Y = Y₀ on Minus nodes at t = 0."""
    domain = field.domain
    wall = domain.boundary_nodes(Side.PLUS)
    boundary_err, initial_err = 0.0, None
    for snap, region in zip(field.snapshots, field.regions):
        if snap.t > 0.0:
            plus = region[0] == Region.PLUS
            if np.any(plus):
                diff = snap.at_points()[0] - data.H.eval(snap.t, wall)
                boundary_err = max(boundary_err, float(np.max(np.abs(diff[plus]))))
        else:
            minus = region == Region.MINUS
            diff = snap.at_points() - data.Y0.eval(0.0, domain.nodes())
            initial_err = float(np.max(np.abs(diff[minus]), initial=0.0))
    results = [CheckResult("boundary_trace", boundary_err, tol, boundary_err <= tol)]
    if initial_err is not None:
        results.append(CheckResult("initial_trace", initial_err, tol, initial_err <= tol))
    return results


def manufactured_error(field: LagrangianField, data: ProblemData) -> float | None:
    """max |Y - Y_exact| over all snapshots and nodes, when Y_exact is known."""
    if data.exact is None:
        return None
    nodes = field.domain.nodes()
    return max(float(np.max(np.abs(s.at_points() - data.exact.eval(s.t, nodes))))
               for s in field.snapshots)


def _velocity_check(config: RunConfig, field: LagrangianField) -> CheckResult:
    lengths = {k: config.raw["domain"][k] for k in ("Lx", "Ly", "Lz")}
    f = forcing_velocity(config.raw["scenario"], lengths)
    tol = config.check_tol
    try:
        residual = max(recover_velocity_and_pressure(config.problem.u, field.snapshots, f,
                                                     t).residual for t in field.times)
    except NotInRangeError as e:
        return CheckResult("velocity_recovery", None, tol, False, note=e.message)
    return CheckResult("velocity_recovery", residual, tol, residual <= tol)


def _continuity_check(compat: CompatReport, diag: DiagnosticsReport, tol: float,
                      expect_jump: bool) -> CheckResult:
    entry = compat.entries["cond0"]
    if not expect_jump:
        return CheckResult("continuity", entry.residual, tol, compat.passed("cond0"))
    if not diag.jumps:
        return CheckResult("continuity", entry.residual, tol, False,
                           note="expected a jump but the jump study is empty")
    estimate = max(float(np.linalg.norm(s.y_estimate)) for _, _, s in diag.jumps)
    passed = not compat.passed("cond0") and estimate > tol
    return CheckResult("continuity", estimate, tol, passed,
                       note="cond0 violated, Y jumps across S" if passed else
                       "expected a cond0 violation with a nonzero jump")


def grade(config: RunConfig, field: LagrangianField, compat: CompatReport,
          diag: DiagnosticsReport, expect_jump: bool = False,
          velocity: CheckResult | None = None) -> list[CheckResult]:
    """Acceptance checks of a run, in report order."""
    tol = config.check_tol
    data = config.problem
    checks = _trace_checks(field, data, tol)
    error = manufactured_error(field, data)
    if error is not None:
        checks.append(CheckResult("manufactured_error", error, tol, error <= tol))
    for test, weak in diag.weak:
        checks.append(CheckResult("weak_residual", weak.relative, tol, weak.relative <= tol,
                                  enforced=compat.passed("cond0"),
                                  note=f"bump at {format_point(test.center)}"))
    if diag.gronwall is not None:
        g = diag.gronwall
        checks.append(CheckResult("gronwall", max(g.energies, default=0.0), tol, g.passed,
                                  note="; ".join(g.notes)))
    if velocity is not None:
        checks.append(velocity)
    checks.append(_continuity_check(compat, diag, tol, expect_jump))
    return checks


def _exit_code(checks: Sequence[CheckResult]) -> ExitCode:
    failed = [c for c in checks if c.enforced and not c.passed]
    return ExitCode.CHECK_FAILURE if failed else ExitCode.PASS


# ---------------------------------------------------------
# ARTIFACTS
# ---------------------------------------------------------
def _write_dumps(field: LagrangianField, out: str) -> list[JsonDict]:
    entries = []
    for i, (snap, region, phi) in enumerate(zip(field.snapshots, field.regions, field.phis)):
        snap_name, mask_name = SNAPSHOT_PATTERN.format(index=i), REGIONS_PATTERN.format(index=i)
        write_grid(os.path.join(out, snap_name), snap)
        write_mask(os.path.join(out, mask_name), field.domain, snap.t, region, phi)
        entries.append({"index": i, "t": snap.t, "snapshot": snap_name, "regions": mask_name})
    return entries


def _write_histories(diag: DiagnosticsReport, out: str) -> int:
    tables = diag.histories()
    for name, (columns, rows) in tables.items():
        write_history_csv(os.path.join(out, HISTORY_PATTERN.format(name=name)), columns, rows)
    return len(tables)


def _run_report(config: RunConfig, field: LagrangianField, checks: Sequence[CheckResult],
                diag: DiagnosticsReport, expect_jump: bool, code: ExitCode) -> JsonDict:
    return {
        "schema": RUN_REPORT_SCHEMA_TAG,
        "preset": config.preset,
        "expect_jump": expect_jump,
        "exit_code": int(code),
        "passed": code == ExitCode.PASS,
        "checks": [c.to_dict() for c in checks],
        "manufactured_error": manufactured_error(field, config.problem),
        "jump_study": [{"t": t, "point": list(x), **s.to_dict()} for t, x, s in diag.jumps],
        "segments": list(field.metadata.get("segments", [])),
    }


def run(config: RunConfig, out: str | None = None, expect_jump: bool = False,
        threads: int = 1) -> ExitCode:
    """
    Full pipeline for one configuration; artifacts go to `out` (or the
    configured output directory).

    Returns:
        ExitCode.PASS when every enforced check passes, else CHECK_FAILURE.
    """
    out = out or config.output_dir
    os.makedirs(out, exist_ok=True)
    log.info(format_header(f"inflowlab run: {config.preset}"))

    field = solve(config.problem, config.snapshot_times, config.domain, config.settings(),
                  threads=threads, tstar_samples=config.tstar_samples)
    compat = _compat(config)
    diag = _diagnostics(config, field)
    velocity = _velocity_check(config, field) if config.checks["velocity_recovery"] else None
    checks = grade(config, field, compat, diag, expect_jump, velocity)
    code = _exit_code(checks)

    formats = set(config.formats)
    written = 0
    snapshots: list[JsonDict] = []
    if "raw" in formats:
        snapshots = _write_dumps(field, out)
        written += 2 * len(snapshots)
    if "json" in formats:
        write_json(os.path.join(out, METADATA_FILENAME), {
            "schema": METADATA_SCHEMA_TAG,
            "config": config.raw,
            "solver": field.metadata,
            "snapshots": snapshots,
        })
        write_json(os.path.join(out, COMPAT_FILENAME),
                   {"schema": COMPAT_SCHEMA_TAG, **compat.to_dict()})
        write_json(os.path.join(out, DIAGNOSTICS_FILENAME), diag.to_dict())
        write_json(os.path.join(out, RUN_REPORT_FILENAME),
                   _run_report(config, field, checks, diag, expect_jump, code))
        written += 4
    if "csv" in formats:
        written += _write_histories(diag, out)

    for c in checks:
        if c.value is None:
            log.info(format_status(f"{c.name}: n/a {c.note}".rstrip(), c.passed))
        else:
            log.info(check_msg(c.name, c.value, c.tol, c.passed))
    log.info(completion_msg("Run", written, out))
    return code


# ---------------------------------------------------------
# VERIFY
# ---------------------------------------------------------
def load_field(directory: str, metadata: JsonDict) -> LagrangianField:
    """
    Rebuilds a LagrangianField from the dumps listed in `metadata`.

    Raises:
        FormatError: A dump is corrupted or disagrees with the metadata.
    """
    entries = metadata.get("snapshots") or []
    if not entries:
        raise FormatError("Metadata lists no snapshot dumps", key=METADATA_FILENAME)
    snapshots, regions, phis = [], [], []
    for entry in entries:
        snap = read_grid(os.path.join(directory, entry["snapshot"]))
        t, region, phi = read_mask(os.path.join(directory, entry["regions"]))
        if snap.t != float(entry["t"]) or t != snap.t:
            raise FormatError(f"Dump times disagree with metadata at t={entry['t']}",
                              key=entry["snapshot"])
        snapshots.append(snap)
        regions.append(region)
        phis.append(phi)
    domain = snapshots[0].domain
    return LagrangianField(domain, [s.t for s in snapshots], snapshots, regions, phis,
                           dict(metadata.get("solver") or {}))


def verify(directory: str) -> ExitCode:
    """
    Recomputes the compat and diagnostics reports of a run from its dumps
    and compares them with the stored reports.

    Raises:
        FileNotFoundError: Metadata, a dump or a stored report is missing.
        FormatError: A dump or report is corrupted.
    """
    metadata = read_json(os.path.join(directory, METADATA_FILENAME), METADATA_SCHEMA_TAG)
    config = load_config(metadata["config"])
    field = load_field(directory, metadata)
    if field.domain.to_dict() != config.domain.to_dict():
        raise FormatError("Dump grid differs from the configured domain", key=directory)
    log.info(format_header(f"inflowlab verify: {directory}"))

    recomputed = {
        COMPAT_FILENAME: {"schema": COMPAT_SCHEMA_TAG, **_compat(config).to_dict()},
        DIAGNOSTICS_FILENAME: _diagnostics(config, field).to_dict(),
    }
    schemas = {COMPAT_FILENAME: COMPAT_SCHEMA_TAG, DIAGNOSTICS_FILENAME: DIAGNOSTICS_SCHEMA_TAG}
    mismatches = []
    for name, report in recomputed.items():
        stored = read_json(os.path.join(directory, name), schemas[name])
        same = dumps_report(stored) == dumps_report(report)
        log.info(format_status(f"{name} {'reproduced' if same else 'differs'}", same))
        if not same:
            mismatches.append(name)
    return ExitCode.CHECK_FAILURE if mismatches else ExitCode.PASS


# ---------------------------------------------------------
# MANUFACTURE
# ---------------------------------------------------------
def manufacture(config: RunConfig, out: str | None = None) -> ExitCode:
    """
    Writes the configured problem as files: H sampled on Γ₊ at ODE-step
    spacing, Y₀, g at the snapshot times and Y_exact when known.
    """
    out = out or config.output_dir
    os.makedirs(out, exist_ok=True)
    data, domain = config.problem, config.domain
    h = config.settings().ode_step
    n_times = int(np.ceil(config.T / h)) + 1
    inflow = BoundaryField.sample(data.H, domain, np.linspace(0.0, config.T, n_times).tolist())
    write_boundary(os.path.join(out, INFLOW_FILENAME), inflow)
    write_grid(os.path.join(out, INITIAL_FILENAME), data.Y0.sample(domain, 0.0))

    files: JsonDict = {"inflow": INFLOW_FILENAME, "initial": INITIAL_FILENAME,
                       "forcing": [], "exact": []}
    for i, t in enumerate(config.snapshot_times):
        name = FORCING_PATTERN.format(index=i)
        write_grid(os.path.join(out, name), data.g.sample(domain, t))
        files["forcing"].append(name)
        if data.exact is not None:
            name = EXACT_PATTERN.format(index=i)
            write_grid(os.path.join(out, name), data.exact.sample(domain, t))
            files["exact"].append(name)
    write_json(os.path.join(out, PROBLEM_FILENAME),
               {"schema": METADATA_SCHEMA_TAG, "config": config.raw, "files": files})
    count = 3 + len(files["forcing"]) + len(files["exact"])
    log.info(completion_msg("Manufacture", count, out))
    return ExitCode.PASS


def load_problem(directory: str, coverage_tol: float = 0.0) -> ProblemData:
    """
    ProblemData rebuilt from `manufacture` output: the configured velocity
    with gridded Y₀, sampled H and gridded g.

    Raises:
        FileNotFoundError: problem.json or a listed dump is missing.
        FormatError: A dump is corrupted.
    """
    manifest = read_json(os.path.join(directory, PROBLEM_FILENAME), METADATA_SCHEMA_TAG)
    config = load_config(manifest["config"])
    files = manifest["files"]
    initial = read_grid(os.path.join(directory, files["initial"]))
    forcing = [read_grid(os.path.join(directory, name)) for name in files["forcing"]]
    exact = [read_grid(os.path.join(directory, name)) for name in files["exact"]]
    return ProblemData(
        u=config.problem.u,
        Y0=GriddedField([initial]),
        H=read_boundary(os.path.join(directory, files["inflow"]), coverage_tol),
        g=GriddedField(forcing, coverage_tol),
        T=config.T,
        exact=GriddedField(exact, coverage_tol) if exact else None,
        name=f"{config.preset}@files")


# ---------------------------------------------------------
# REPORT
# ---------------------------------------------------------
def _optional_json(path: str, schema: str) -> JsonDict | None:
    return read_json(path, schema) if os.path.isfile(path) else None


def _render(run_report: JsonDict | None, compat: JsonDict | None,
            diagnostics: JsonDict | None) -> list[str]:
    lines: list[str] = []
    if run_report is not None:
        lines.append(format_header(f"run report: {run_report.get('preset', '?')}"))
        for c in run_report.get("checks", []):
            if c["value"] is None:
                lines.append(format_status(f"{c['name']}: n/a {c['note']}".rstrip(), c["passed"]))
            else:
                lines.append(check_msg(c["name"], c["value"], c["tol"], c["passed"]))
        lines.append(format_status(f"exit code {run_report.get('exit_code')}",
                                   bool(run_report.get("passed"))))
    if compat is not None:
        lines.append(format_header("compatibility"))
        for name, entry in compat.get("conditions", {}).items():
            if entry["residual"] is None:
                lines.append(format_list_item(f"{name}: unavailable ({entry['note']})"))
            else:
                trust = "" if entry["trusted"] else " [untrusted]"
                lines.append(check_msg(name, entry["residual"], compat["tol"],
                                       bool(entry["passed"])) + trust)
    if diagnostics is not None:
        lines.append(format_header("diagnostics"))
        for r in diagnostics.get("strong_residual", []):
            lines.append(format_list_item(
                f"t={r['t']:.6g} strong residual sup -/+ = {r['sup_minus']:.3e} / "
                f"{r['sup_plus']:.3e}"))
        for w in diagnostics.get("weak_residual", []):
            lines.append(format_list_item(f"weak residual at {format_point(w['center'])}: "
                                          f"relative {w['relative']:.3e}"))
        for j in diagnostics.get("jumps", []):
            lines.append(format_list_item(
                f"jump at t={j['t']:.6g}, {format_point(j['point'])}: "
                f"|Y jump| = {float(np.linalg.norm(j['y_estimate'])):.3e}, "
                f"|DY jump| = {float(np.linalg.norm(j['dy_estimate'])):.3e}"))
        for note in diagnostics.get("notes", []):
            lines.append(format_list_item(note))
    return lines


def _tables(diagnostics: JsonDict) -> dict[str, tuple[list[str], list[list[Any]]]]:
    """Gnuplot tables rebuilt from a diagnostics report."""
    tables: dict[str, tuple[list[str], list[list[Any]]]] = {}
    fluxes = diagnostics.get("divergence_flux") or []
    if fluxes:
        cols = ["t", "divergence", "flux_plus", "flux_minus", "sup_norm"]
        tables["divergence"] = (cols, [[r[c] for c in cols] for r in fluxes])
    strong = diagnostics.get("strong_residual") or []
    if strong:
        cols = ["t", "sup_minus", "sup_plus", "l2_minus", "l2_plus"]
        tables["strong_residual"] = (cols, [[r[c] for c in cols] for r in strong])
    gronwall = diagnostics.get("gronwall")
    if gronwall:
        tables["energy"] = (["t", "energy", "bound"],
                            [list(row) for row in zip(gronwall["times"], gronwall["energies"],
                                                      gronwall["bounds"])])
    regularity = diagnostics.get("regularity")
    if regularity:
        tables["holder"] = (["t", "holder"],
                            [list(row) for row in zip(diagnostics["times"],
                                                      regularity["holder_Y_snapshots"])])
    return tables


def report(directory: str) -> ExitCode:
    """
    Renders the reports of a run directory to report.txt and gnuplot tables.

    Raises:
        FileNotFoundError: The directory holds none of the JSON reports.
        FormatError: A report is corrupted or carries a different schema.
    """
    run_report = _optional_json(os.path.join(directory, RUN_REPORT_FILENAME),
                                RUN_REPORT_SCHEMA_TAG)
    compat = _optional_json(os.path.join(directory, COMPAT_FILENAME), COMPAT_SCHEMA_TAG)
    diagnostics = _optional_json(os.path.join(directory, DIAGNOSTICS_FILENAME),
                                 DIAGNOSTICS_SCHEMA_TAG)
    if run_report is None and compat is None and diagnostics is None:
        raise FileNotFoundError(f"No run reports found in {directory}")

    lines = _render(run_report, compat, diagnostics)
    atomic_write_text(os.path.join(directory, REPORT_TEXT_FILENAME), "\n".join(lines) + "\n")
    for line in lines:
        log.info(line)
    tables = _tables(diagnostics) if diagnostics is not None else {}
    for name, (columns, rows) in tables.items():
        write_gnuplot_table(os.path.join(directory, TABLE_PATTERN.format(name=name)),
                            columns, rows, title=name)
    log.info(completion_msg("Report", 1 + len(tables), directory))
    return ExitCode.PASS
