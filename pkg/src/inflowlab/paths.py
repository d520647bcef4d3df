"""
inflowlab Path Configuration and Management
===========================================

This module centralizes directory management for the `inflowlab` package.
It resolves the project-relative working folders used for logs and run
artifacts.

Core Features:
--------------
* Workspace Initialization: Locates the project root and ensures the local
  working directories (`logs/`, `runs/`) exist.
* Environment Override: `INFLOWLAB_HOME` relocates both folders, which is
  how installed copies and CI jobs keep their output out of site-packages.
"""
import os
from typing import Final

# ==========================================
# 1. DYNAMIC LOCAL PATHS (Project Relative)
# ==========================================
_THIS_FILE_DIR = os.path.dirname(os.path.abspath(__file__))
_SRC_DIR = os.path.dirname(_THIS_FILE_DIR)
PROJECT_ROOT = os.path.dirname(_SRC_DIR)

# ==========================================
# 2. ENVIRONMENT OVERRIDE
# ==========================================
INFLOWLAB_HOME = os.getenv("INFLOWLAB_HOME", PROJECT_ROOT)

LOCAL_LOG_PATH = os.path.join(INFLOWLAB_HOME, "logs")
LOCAL_RUNS_PATH = os.path.join(INFLOWLAB_HOME, "runs")

# Auto-create local directories if they don't exist yet
os.makedirs(LOCAL_LOG_PATH, exist_ok=True)
os.makedirs(LOCAL_RUNS_PATH, exist_ok=True)

# ==========================================
# 3. ARTIFACT FILENAMES
# ==========================================
METADATA_FILENAME: Final = "metadata.json"
COMPAT_FILENAME: Final = "compat.json"
DIAGNOSTICS_FILENAME: Final = "diagnostics.json"
RUN_REPORT_FILENAME: Final = "run_report.json"
SNAPSHOT_PATTERN: Final = "snapshot_{index:03d}.bin"
REGIONS_PATTERN: Final = "regions_{index:03d}.bin"
HISTORY_PATTERN: Final = "history_{name}.csv"
REPORT_TEXT_FILENAME: Final = "report.txt"
TABLE_PATTERN: Final = "table_{name}.dat"

# Problem files written by `manufacture`
PROBLEM_FILENAME: Final = "problem.json"
INFLOW_FILENAME: Final = "inflow.bin"
INITIAL_FILENAME: Final = "initial.bin"
FORCING_PATTERN: Final = "forcing_{index:03d}.bin"
EXACT_PATTERN: Final = "exact_{index:03d}.bin"

DEFAULT_OUTPUT_DIR = os.path.join(LOCAL_RUNS_PATH, "latest")
