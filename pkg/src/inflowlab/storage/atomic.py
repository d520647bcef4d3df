"""
Atomic File Replacement
=======================

Every artifact is written to a temporary file in its target directory and
moved into place with `os.replace` once the write completed. A failed write
leaves the previous file (if any) untouched and removes the temporary file.
"""
import os
from collections.abc import Callable
from tempfile import NamedTemporaryFile
from typing import IO, Any

from inflowlab.config import ENCODING_TYPE
from inflowlab.utils.logger import get_logger

log = get_logger(__name__)


def _atomic(path: str, mode: str, writer: Callable[[IO[Any]], None]) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    kwargs: dict[str, Any] = {"mode": mode, "delete": False, "dir": directory,
                              "prefix": ".tmp_", "suffix": os.path.basename(path)}
    if "b" not in mode:
        kwargs.update(newline="", encoding=ENCODING_TYPE)
    temp_file = NamedTemporaryFile(**kwargs)  # pylint: disable=consider-using-with
    try:
        with temp_file as handle:
            writer(handle)
        os.replace(temp_file.name, path)
    except BaseException:
        if os.path.exists(temp_file.name):
            os.remove(temp_file.name)
        raise
    log.debug("Wrote %s", path)


def atomic_write_text(path: str, text: str) -> None:
    """Writes UTF-8 text to `path` atomically."""
    _atomic(path, "w", lambda f: f.write(text))


def atomic_write_bytes(path: str, payload: bytes) -> None:
    """Writes raw bytes to `path` atomically."""
    _atomic(path, "wb", lambda f: f.write(payload))


def atomic_write_with(path: str, writer: Callable[[IO[Any]], None]) -> None:
    """Runs `writer` against a text handle that replaces `path` on success."""
    _atomic(path, "w", writer)
