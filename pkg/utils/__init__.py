"""
Utility functions package
Conversions, validators, config loading and result writers
"""

from .helpers import (
    format_number,
    format_duration,
    parse_bool,
    parse_complex,
    parse_list
)

from .validators import (
    validate_dynamics,
    validate_positive,
    validate_trajectory_count,
    validate_seed,
    validate_time_grid,
    validate_output_path,
    validate_dims,
    validate_amplitudes,
    validate_scenario_name
)

__all__ = [
    'format_number',
    'format_duration',
    'parse_bool',
    'parse_complex',
    'parse_list',
    'validate_dynamics',
    'validate_positive',
    'validate_trajectory_count',
    'validate_seed',
    'validate_time_grid',
    'validate_output_path',
    'validate_dims',
    'validate_amplitudes',
    'validate_scenario_name'
]
