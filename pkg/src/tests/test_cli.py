"""
Tests for the inflowlab CLI Dispatcher
======================================
Verifies that subcommands route to the pipeline workflows through the
Dispatch Map and that errors map onto the documented exit codes.
"""

import logging
import sys
import unittest
from unittest.mock import patch, MagicMock, ANY

# Internal package imports
from inflowlab.cli import main, resolve_threads, setup_parsers
from inflowlab.constants import ExitCode
from inflowlab.core.exceptions import ConfigError, FormatError, NumericError, SignConditionError


class TestCLIDispatcher(unittest.TestCase):
    """Verifies command routing and error handling in the CLI."""

    def setUp(self) -> None:
        # log is created at import time, so the module attribute is patched
        self.patcher_log = patch("inflowlab.cli.log")
        self.mock_log = self.patcher_log.start()
        self.addCleanup(self.patcher_log.stop)

        # settings.ini in the working directory must not leak into the tests
        self.patcher_defaults = patch("inflowlab.cli.get_config_defaults",
                                      return_value={"out_dir": "", "threads": ""})
        self.patcher_defaults.start()
        self.addCleanup(self.patcher_defaults.stop)

    def _main(self, argv: list[str]) -> int:
        with patch.object(sys, "argv", ["cli.py", *argv]):
            with self.assertRaises(SystemExit) as cm:
                main()
        return cm.exception.code

    @patch("inflowlab.cli.resolve_threads", return_value=4)
    @patch("inflowlab.cli.run", return_value=ExitCode.PASS)
    @patch("inflowlab.cli.parse_config")
    def test_dispatch_run(self, mock_parse: MagicMock, mock_run: MagicMock,
                          _threads: MagicMock) -> None:
        """Verifies 'run' parses the config with its overrides and forwards the flags."""
        code = self._main(["run", "--config", "c.json", "--override", "time.T=1",
                           "--override", "seed=3", "--expect-jump"])

        self.assertEqual(code, 0)
        mock_parse.assert_called_once_with("c.json", ["time.T=1", "seed=3"])
        mock_run.assert_called_once_with(mock_parse.return_value, None, True, 4)

    @patch("inflowlab.cli.resolve_threads", return_value=1)
    @patch("inflowlab.cli.run", return_value=ExitCode.CHECK_FAILURE)
    @patch("inflowlab.cli.parse_config")
    def test_run_check_failure(self, _parse: MagicMock, mock_run: MagicMock,
                               _threads: MagicMock) -> None:
        """A failed acceptance check exits with 1; --out reaches the pipeline."""
        code = self._main(["run", "--config", "c.json", "--out", "runs/x"])

        self.assertEqual(code, 1)
        args, _ = mock_run.call_args
        self.assertEqual(args[1], "runs/x")
        self.assertFalse(args[2])

    @patch("inflowlab.cli.manufacture", return_value=ExitCode.PASS)
    @patch("inflowlab.cli.parse_config")
    def test_dispatch_manufacture(self, mock_parse: MagicMock, mock_man: MagicMock) -> None:
        code = self._main(["manufacture", "--config", "c.json", "--out", "data"])

        self.assertEqual(code, 0)
        mock_man.assert_called_once_with(mock_parse.return_value, "data")

    @patch("inflowlab.cli.verify", return_value=ExitCode.PASS)
    def test_dispatch_verify(self, mock_verify: MagicMock) -> None:
        self.assertEqual(self._main(["verify", "runs/latest"]), 0)
        mock_verify.assert_called_once_with("runs/latest")

    @patch("inflowlab.cli.report", return_value=ExitCode.PASS)
    def test_dispatch_report(self, mock_report: MagicMock) -> None:
        self.assertEqual(self._main(["report", "runs/latest"]), 0)
        mock_report.assert_called_once_with("runs/latest")

    @patch("inflowlab.cli.parse_config")
    def test_config_error_exits_with_2(self, mock_parse: MagicMock) -> None:
        mock_parse.side_effect = ConfigError("Unknown key", key="domain.Nq")
        self.assertEqual(self._main(["run", "--config", "c.json"]), ExitCode.CONFIG_ERROR)
        self.mock_log.error.assert_called_with("Configuration Error: %s", ANY)

    @patch("inflowlab.cli.parse_config")
    def test_data_error_exits_with_2(self, mock_parse: MagicMock) -> None:
        """Sign-condition violations are input errors."""
        mock_parse.side_effect = SignConditionError("u1 <= 0 on the inflow wall")
        self.assertEqual(self._main(["run", "--config", "c.json"]), 2)

    @patch("inflowlab.cli.verify")
    def test_format_error_exits_with_2(self, mock_verify: MagicMock) -> None:
        mock_verify.side_effect = FormatError("Payload holds 8 bytes")
        self.assertEqual(self._main(["verify", "runs/latest"]), 2)

    @patch("inflowlab.cli.report")
    def test_missing_file_exits_with_2(self, mock_report: MagicMock) -> None:
        mock_report.side_effect = FileNotFoundError("runs/empty")
        self.assertEqual(self._main(["report", "runs/empty"]), 2)

    @patch("inflowlab.cli.verify")
    def test_numeric_error_exits_with_3(self, mock_verify: MagicMock) -> None:
        mock_verify.side_effect = NumericError("Grid field contains non-finite entries")
        self.assertEqual(self._main(["verify", "runs/latest"]), ExitCode.NUMERIC_ERROR)

    @patch("inflowlab.cli.verify")
    def test_main_handles_exception(self, mock_verify: MagicMock) -> None:
        """Verifies the global handler logs unexpected errors with a traceback."""
        mock_verify.side_effect = Exception("Data Corrupt")

        self.assertEqual(self._main(["verify", "runs/latest"]), 3)
        self.mock_log.error.assert_called_with(
            "Critical failure in %s: %s", "verify", ANY, exc_info=True
        )

    @patch("inflowlab.cli.setup_parsers")
    def test_no_command_prints_help(self, mock_setup: MagicMock) -> None:
        mock_setup.return_value.parse_args.return_value = MagicMock(command=None)
        self.assertEqual(self._main([]), 0)
        mock_setup.return_value.print_help.assert_called_once()

    def test_negative_threads_rejected(self) -> None:
        self.assertEqual(self._main(["config", "--set-threads", "-1"]), 2)

    @patch("inflowlab.cli.set_console_level")
    @patch("inflowlab.cli.verify", return_value=ExitCode.PASS)
    def test_verbose_sets_debug(self, _verify: MagicMock, mock_level: MagicMock) -> None:
        self._main(["-v", "verify", "runs/latest"])
        mock_level.assert_called_once_with(logging.DEBUG)

    def test_parser_defaults(self) -> None:
        """--override defaults to an empty list and --expect-jump to False."""
        parser = setup_parsers()
        args = parser.parse_args(["run", "--config", "c.json"])

        self.assertEqual(args.override, [])
        self.assertFalse(args.expect_jump)
        self.assertIsNone(args.out)

    def test_parser_requires_config(self) -> None:
        parser = setup_parsers()
        with patch("sys.stderr"):
            with self.assertRaises(SystemExit):
                parser.parse_args(["run"])

    @patch.dict("os.environ", {"INFLOWLAB_THREADS": "3"})
    def test_threads_env_overrides_settings(self) -> None:
        self.assertEqual(resolve_threads(), 3)


if __name__ == "__main__":
    unittest.main()
