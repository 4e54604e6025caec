"""
Input validation functions
Validate experiment settings before any simulation runs
"""

import math
import os
import re

from quantum.collapse_dynamics import DYNAMICS_KINDS


def validate_dynamics(kind):
    """
    Validate the dynamics kind

    Args:
        kind: dynamics name from the config

    Returns:
        tuple: (is_valid, error_message)
    """
    if not kind or not kind.strip():
        return False, "Dynamics kind is required"

    if kind.strip() not in DYNAMICS_KINDS:
        return False, f"Dynamics must be one of {', '.join(DYNAMICS_KINDS)}"

    return True, None


def validate_positive(name, value, allow_zero=False):
    """
    Validate a finite positive number

    Returns:
        tuple: (is_valid, error_message)
    """
    if value is None or not math.isfinite(value):
        return False, f"{name} must be a finite number"

    if allow_zero and value < 0:
        return False, f"{name} must be >= 0"

    if not allow_zero and value <= 0:
        return False, f"{name} must be positive"

    return True, None


def validate_trajectory_count(n):
    if n < 1:
        return False, "n_trajectories must be at least 1"
    if n > 10_000_000:
        return False, "n_trajectories is unreasonably large (limit 10^7)"
    return True, None


def validate_seed(seed):
    """
    Validate a master seed

    Returns:
        tuple: (is_valid, error_message)
    """
    if seed < 0:
        return False, "master_seed must be non-negative"

    if seed >= 2 ** 64:
        return False, "master_seed must fit in 64 bits"

    return True, None


def validate_time_grid(times):
    """
    Validate a closed-form time grid: nonempty, starts after 0, strictly increasing

    Returns:
        tuple: (is_valid, error_message)
    """
    if not times:
        return False, "Time grid is empty"

    if any(not math.isfinite(t) for t in times):
        return False, "Time grid contains non-finite values"

    if times[0] <= 0:
        return False, "Time grid must start after t = 0"

    if any(b <= a for a, b in zip(times, times[1:])):
        return False, "Time grid must be strictly increasing"

    return True, None


def validate_output_path(path):
    """
    Validate a CSV output path

    Returns:
        tuple: (is_valid, error_message)
    """
    if not path or not path.strip():
        return False, "Output path is required"

    path = path.strip()

    if not path.lower().endswith('.csv'):
        return False, "Output path must end in .csv"

    directory = os.path.dirname(path)
    if directory and os.path.exists(directory) and not os.path.isdir(directory):
        return False, f"'{directory}' exists and is not a directory"

    return True, None


def validate_dims(dims):
    """
    Validate local dimensions of a register

    Returns:
        tuple: (is_valid, error_message)
    """
    if not dims:
        return False, "At least one subsystem is required"

    if any(d < 2 for d in dims):
        return False, "Every local dimension must be at least 2"

    if math.prod(dims) > 2 ** 10:
        return False, "Total dimension exceeds 1024"

    return True, None


def validate_amplitudes(amplitudes, dim):
    """
    Validate inline state amplitudes against the register dimension

    Returns:
        tuple: (is_valid, error_message)
    """
    if len(amplitudes) != dim:
        return False, f"Expected {dim} amplitudes, got {len(amplitudes)}"

    if not any(abs(a) > 0 for a in amplitudes):
        return False, "Amplitudes are all zero"

    return True, None


def validate_scenario_name(name, available):
    if not name or not re.match(r'^[a-z0-9\-]+$', name):
        return False, "Scenario name must be lowercase letters, digits and hyphens"

    if name not in available:
        return False, f"Unknown scenario '{name}'; available: {', '.join(available)}"

    return True, None
