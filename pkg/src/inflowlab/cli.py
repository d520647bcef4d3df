"""
inflowlab Command-Line Interface (CLI)
======================================

A unified command-line tool for constructing and verifying Lagrangian
solutions of the linearized vorticity transport equation with inflow and
outflow boundaries on a periodic channel.

Available Commands:
-------------------
[Configuration]
* config       : Manage settings.ini defaults (output directory, threads).

[Simulation]
* run          : Solve, check compatibility, run diagnostics, write artifacts.
* manufacture  : Write the data of a configured problem as dump files.

[Inspection]
* verify       : Recompute compat and diagnostics from an existing run.
* report       : Render a run's JSON reports as text and gnuplot tables.

Exit Codes:
-----------
0 pass, 1 check failure, 2 configuration or input error, 3 numeric error.

Note: INFLOWLAB_THREADS overrides the thread count from settings.ini;
      0 means one worker per CPU.
"""

import argparse
import configparser
import logging
import os
import sys
from collections.abc import Callable

# Project Imports
from inflowlab.utils import get_logger, set_console_level
from .config import CONFIG_FILE_NAME, ENCODING_TYPE, resolve_thread_count
from .constants import ExitCode
from .core.exceptions import (
    CapabilityError,
    ConfigError,
    DataError,
    FormatError,
    GeometryError,
    NumericError
)
from .pipeline import manufacture, report, run, verify
from .scenarios.runconfig import parse_config


# Initialize the log for this specific module
log = get_logger(__name__)


def get_config_defaults() -> dict[str, str]:
    """
    Reads out_dir and threads from settings.ini.
    Returns a dictionary of defaults; empty strings mean unset.
    """
    config = configparser.ConfigParser()
    defaults = {"out_dir": "", "threads": ""}
    if os.path.isfile(CONFIG_FILE_NAME):
        config.read(CONFIG_FILE_NAME, encoding=ENCODING_TYPE)
        if config.has_section("Run"):
            defaults["out_dir"] = config.get("Run", "out_dir", fallback="")
            defaults["threads"] = config.get("Run", "threads", fallback="")
    return defaults


def save_config(out_dir: str | None = None, threads: int | None = None) -> ExitCode:
    """
    Updates settings.ini with new persistent defaults.
    """
    config = configparser.ConfigParser()
    if os.path.isfile(CONFIG_FILE_NAME):
        config.read(CONFIG_FILE_NAME, encoding=ENCODING_TYPE)
    if "Run" not in config:
        config["Run"] = {}
    if out_dir:
        config["Run"]["out_dir"] = out_dir
    if threads is not None:
        if threads < 0:
            raise ConfigError("Thread count must be non-negative", key="--set-threads")
        config["Run"]["threads"] = str(threads)
    with open(CONFIG_FILE_NAME, "w", encoding=ENCODING_TYPE) as f:
        config.write(f)
    log.info("Saved defaults to %s", CONFIG_FILE_NAME)
    return ExitCode.PASS


def resolve_threads() -> int:
    """settings.ini thread count, overridden by INFLOWLAB_THREADS."""
    raw = get_config_defaults().get("threads", "")
    try:
        configured = int(raw) if raw else None
    except ValueError:
        log.warning("Ignoring non-integer thread count %r in %s", raw, CONFIG_FILE_NAME)
        configured = None
    return resolve_thread_count(configured)


def resolve_out(args: argparse.Namespace) -> str | None:
    """--out, then the settings.ini default; None defers to the run configuration."""
    return args.out or get_config_defaults().get("out_dir") or None


def setup_parsers() -> argparse.ArgumentParser:
    """
    Configures the argument parsing for all subcommands.
    """
    # =========================
    # PARENT PARSERS
    # =========================
    base_parser = argparse.ArgumentParser(
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter
    )

    verbosity = base_parser.add_mutually_exclusive_group()
    verbosity.add_argument(
        "-v", "--verbose", action="store_true",
        help="Enable debug logging output."
    )
    verbosity.add_argument(
        "--quiet", action="store_true",
        help="Only print warnings and errors."
    )

    subparsers = base_parser.add_subparsers(
        dest="command",
        required=False,
        title="subcommands",
        metavar="<command>"
    )

    def add_config_arguments(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, metavar="PATH",
                       help="UTF-8 JSON run configuration")
        p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                       help="Dotted configuration override, e.g. time.T=0.8 (repeatable)")
        p.add_argument("--out", metavar="DIR", help="Output directory")

    #=========================
    # CONFIG COMMANDS
    #=========================
    p_conf = subparsers.add_parser("config",
                                   help="Manage settings.ini")
    p_conf.add_argument("--set-out", help="Set default output directory")
    p_conf.add_argument("--set-threads", type=int, help="Set default thread count (0 = auto)")

    # =========================
    # SIMULATION COMMANDS
    # =========================
    p_run = subparsers.add_parser("run",
                                  help="Solve and verify a configured scenario")
    add_config_arguments(p_run)
    p_run.add_argument("--expect-jump", action="store_true",
                       help="Negative control: require a cond0 violation with a measured jump")

    p_man = subparsers.add_parser("manufacture",
                                  help="Write problem data files from an expression config")
    add_config_arguments(p_man)

    # =========================
    # INSPECTION COMMANDS
    # =========================
    p_ver = subparsers.add_parser("verify",
                                  help="Recompute compat and diagnostics of an existing run")
    p_ver.add_argument("directory", help="Run output directory")

    p_rep = subparsers.add_parser("report",
                                  help="Render a run's reports as text and gnuplot tables")
    p_rep.add_argument("directory", help="Run output directory")

    return base_parser


# Dispatch Map
# Lambda delayed execution keeps configuration parsing inside the error handlers
# -------------------------------------------------------------------------
COMMAND_MAP: dict[str, Callable[[argparse.Namespace], ExitCode]] = {
    "config": lambda a: save_config(
        a.set_out,
        a.set_threads
        ),
    "run": lambda a: run(
        parse_config(a.config, a.override),
        resolve_out(a),
        a.expect_jump,
        resolve_threads()
        ),
    "manufacture": lambda a: manufacture(
        parse_config(a.config, a.override),
        resolve_out(a)
        ),
    "verify": lambda a: verify(
        a.directory
        ),
    "report": lambda a: report(
        a.directory
        ),
}


def main() -> None:
    """Main execution loop using a Dispatch Map."""

    parser = setup_parsers()
    args = parser.parse_args()

    if not args.command:
        parser.print_help()
        sys.exit(ExitCode.PASS)

    if args.verbose:
        set_console_level(logging.DEBUG)
    elif args.quiet:
        set_console_level(logging.WARNING)

    try:
        log.debug("Executing: %s", args.command)
        code = COMMAND_MAP[args.command](args)
        log.debug("Completed %s with exit code %d", args.command, code)

    except ConfigError as e:
        log.error("Configuration Error: %s", e)
        sys.exit(ExitCode.CONFIG_ERROR)
    except DataError as e:
        log.error("Data Error: %s", e)
        sys.exit(ExitCode.CONFIG_ERROR)
    except FormatError as e:
        log.error("Format Error: %s", e)
        sys.exit(ExitCode.CONFIG_ERROR)
    except FileNotFoundError as e:
        log.error("Missing file: '%s'", e)
        sys.exit(ExitCode.CONFIG_ERROR)
    except (NumericError, CapabilityError, GeometryError) as e:
        log.error("Numeric Error in %s: %s", args.command, e)
        sys.exit(ExitCode.NUMERIC_ERROR)
    except Exception as e: # pylint: disable=W0718
        log.error("Critical failure in %s: %s", args.command, e, exc_info=True)
        sys.exit(ExitCode.NUMERIC_ERROR)

    sys.exit(code)

if __name__ == "__main__":
    main()
