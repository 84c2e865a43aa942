"""
Configuration module for the entropy calculus toolkit.
Contains environment variables, paths, tolerances, and settings.
"""
import math
import os
from pathlib import Path
from typing import Dict, Any, Optional, Union

from src.errors import ValidationError

# Base paths
BASE_DIR = Path(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
DATA_DIR = BASE_DIR / "data"

# Example input files
EPR_STATE_FILE = DATA_DIR / "epr_state.json"
CORRELATED_TABLE_FILE = DATA_DIR / "correlated_pair.json"
CLASSICAL_STATE_FILE = DATA_DIR / "classically_correlated_state.json"
PARITY_SYSTEM_FILE = DATA_DIR / "two_uniform_bits.json"

# Log base settings
DEFAULT_LOG_BASE = 2.0
LOG_BASE_ENV_VAR = "ENTRO_LOG_BASE"

# Classical table settings
NORMALIZATION_TOLERANCE = 1e-12
RENORMALIZE_TOLERANCE = 1e-9
MAX_TABLE_CELLS = 2 ** 20

# Equilibration demo limits
EQUILIBRATION_MAX_PARTICLES = 4
EQUILIBRATION_MAX_CELLS = 16
JOINT_ENTROPY_TOLERANCE = 1e-12

# Density matrix settings
HERMITIAN_TOLERANCE = 1e-10
PSD_TOLERANCE = 1e-10
TRACE_TOLERANCE = 1e-10
NORM_TOLERANCE = 1e-10
UNITARY_TOLERANCE = 1e-10
SUPPORT_CUTOFF = 1e-12
MAX_DIMENSION = 64

# Jacobi eigensolver
JACOBI_TOLERANCE = 1e-12
JACOBI_MAX_SWEEPS = 100

# Quantum entropy settings
WITNESS_TOLERANCE = 1e-9
CONDITIONAL_AGREEMENT_TOLERANCE = 1e-8

# Black hole ledger settings
BH_MAX_STEP_FRACTION = 0.01

# Acceptance time limits (seconds)
EPR_DIAGRAM_SECONDS = 1e-3
LEDGER_SECONDS = 1.0

# Logging settings
LOG_LEVEL = "INFO"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def resolve_log_base(value: Optional[Union[str, float]] = None) -> float:
    """
    Resolve a log base given as "2", "e", 2 or math.e.

    Args:
        value: Requested base; None falls back to DEFAULT_LOG_BASE

    Returns:
        float: The numeric log base
    """
    if value is None:
        return DEFAULT_LOG_BASE
    if isinstance(value, str):
        text = value.strip().lower()
        if text == "e":
            return math.e
        if text == "2":
            return 2.0
        raise ValidationError(f"Unsupported log base '{value}' (expected '2' or 'e')")
    if value == 2 or value == math.e:
        return float(value)
    raise ValidationError(f"Unsupported log base {value} (expected 2 or e)")


def log_base_from_env() -> float:
    """
    Read the information-theory log base override from the environment.

    Returns:
        float: Base named by ENTRO_LOG_BASE, or the default base
    """
    return resolve_log_base(os.environ.get(LOG_BASE_ENV_VAR))


def get_settings() -> Dict[str, Any]:
    """
    Returns all configuration settings as a dictionary.

    Returns:
        Dict[str, Any]: Configuration settings
    """
    return {
        "base_dir": BASE_DIR,
        "data_dir": DATA_DIR,
        "default_log_base": DEFAULT_LOG_BASE,
        "normalization_tolerance": NORMALIZATION_TOLERANCE,
        "renormalize_tolerance": RENORMALIZE_TOLERANCE,
        "max_table_cells": MAX_TABLE_CELLS,
        "hermitian_tolerance": HERMITIAN_TOLERANCE,
        "psd_tolerance": PSD_TOLERANCE,
        "trace_tolerance": TRACE_TOLERANCE,
        "support_cutoff": SUPPORT_CUTOFF,
        "jacobi_tolerance": JACOBI_TOLERANCE,
        "jacobi_max_sweeps": JACOBI_MAX_SWEEPS,
        "max_dimension": MAX_DIMENSION,
        "witness_tolerance": WITNESS_TOLERANCE,
        "bh_max_step_fraction": BH_MAX_STEP_FRACTION,
        "epr_diagram_seconds": EPR_DIAGRAM_SECONDS,
        "ledger_seconds": LEDGER_SECONDS,
        "log_level": LOG_LEVEL,
        "log_format": LOG_FORMAT
    }
