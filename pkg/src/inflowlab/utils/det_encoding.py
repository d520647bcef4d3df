"""
Character Encoding Detection Utility
====================================

Scans a file, or the leading bytes of a dump header, to detect its
character encoding. Config files and dump headers must be UTF-8; plain
ASCII is accepted as the UTF-8 subset.
"""
from pathlib import Path
from typing import Final
import chardet

_UTF8_COMPATIBLE: Final[frozenset[str]] = frozenset({"utf-8", "ascii", "utf-8-sig"})


def detect_encoding(file_path: Path | str) -> str | None:
    with open(file_path, 'rb') as file:
        detector = chardet.universaldetector.UniversalDetector()
        for line in file:
            detector.feed(line)
            if detector.done:
                break
        detector.close()
    return detector.result['encoding']


def detect_bytes_encoding(data: bytes) -> str | None:
    """Detects the encoding of an in-memory byte string."""
    if not data:
        return "ascii"
    return chardet.detect(data)['encoding']


def is_utf8_compatible(encoding: str | None) -> bool:
    """True when the detected encoding is readable as UTF-8."""
    return encoding is not None and encoding.lower() in _UTF8_COMPATIBLE
