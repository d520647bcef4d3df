"""
Package-wide configuration constants and small config helpers.
"""
import os
from typing import Any, Final
from collections.abc import Mapping

ENCODING_TYPE: Final = "utf-8"
CONFIG_FILE_NAME: Final = "settings.ini"

CONFIG_SCHEMA_TAG: Final = "inflowlab.config/1"
GRID_DUMP_SCHEMA_TAG: Final = "inflowlab.griddump/1"
COMPAT_SCHEMA_TAG: Final = "inflowlab.compat/1"
DIAGNOSTICS_SCHEMA_TAG: Final = "inflowlab.diagnostics/1"
RUN_REPORT_SCHEMA_TAG: Final = "inflowlab.runreport/1"
METADATA_SCHEMA_TAG: Final = "inflowlab.metadata/1"

THREADS_ENV_VAR: Final = "INFLOWLAB_THREADS"


type JsonDict = dict[str, Any]


def deep_merge(base: Mapping[str, Any], update: Mapping[str, Any]) -> JsonDict:
    """
    Recursively merges `update` over `base`, returning a new dictionary.
    Nested mappings are merged key by key; every other value is replaced.
    """
    merged: JsonDict = {k: (deep_merge(v, {}) if isinstance(v, Mapping) else v)
                        for k, v in base.items()}
    for key, value in update.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
            merged[key] = deep_merge(merged[key], value)
        elif isinstance(value, Mapping):
            merged[key] = deep_merge(value, {})
        else:
            merged[key] = value
    return merged


def resolve_thread_count(configured: int | None = None) -> int:
    """
    Resolves the worker count: INFLOWLAB_THREADS wins over the configured
    value, and 0 (or an unparsable value) means one worker per CPU.
    """
    raw = os.getenv(THREADS_ENV_VAR)
    count = configured if configured is not None else 0
    if raw is not None:
        try:
            count = int(raw)
        except ValueError:
            count = 0
    if count <= 0:
        count = os.cpu_count() or 1
    return count
