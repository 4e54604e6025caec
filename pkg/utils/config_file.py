"""
Experiment config loader
Strict INI parsing: unknown sections or keys are rejected with the line they appear on.

Schema
  [experiment]  dynamics*, n_trajectories*, master_seed*, output*,
                scenario, lambda, collapse_operator, xlsx
  [grid]        times | t_final + n_points      (csl-closed)
                dt, steps, record_every, hamiltonian (csl-sde)
                t_final, dt                     (grw)
  [grw]         rate, smearing
  [scenario]    keyword arguments of the scenario builder
  [state]       dims, amplitudes, eigenvalues, basis (one row per line)
"""

import configparser
import re
from dataclasses import dataclass, field

from quantum.errors import ConfigError
from quantum.scenarios import scenario_catalog
from utils.helpers import parse_bool, parse_complex, parse_list
from utils.validators import (
    validate_amplitudes,
    validate_dims,
    validate_dynamics,
    validate_output_path,
    validate_positive,
    validate_scenario_name,
    validate_seed,
    validate_time_grid,
    validate_trajectory_count,
)


def _str(text):
    return text.strip()


def _int_list(text):
    return parse_list(text, int)


def _complex_list(text):
    return parse_list(text, parse_complex)


def _basis_rows(text):
    rows = [line.strip() for line in text.strip().splitlines() if line.strip()]
    return [parse_list(row, parse_complex) for row in rows]


SCHEMA = {
    'experiment': {
        'dynamics': _str,
        'n_trajectories': int,
        'master_seed': int,
        'output': _str,
        'scenario': _str,
        'lambda': float,
        'collapse_operator': _str,
        'xlsx': parse_bool,
    },
    'grid': {
        'times': parse_list,
        't_final': float,
        'n_points': int,
        'dt': float,
        'steps': int,
        'record_every': int,
        'hamiltonian': _str,
    },
    'grw': {
        'rate': float,
        'smearing': float,
    },
    'scenario': {
        'alpha': parse_complex,
        'beta': parse_complex,
        'with_observer': parse_bool,
        'collapse': _str,
        'n_env': int,
        'theta': float,
        'phi_split': float,
        'effective': parse_bool,
        'mode': _str,
        'omega': float,
        'ratio': float,
        'p0': float,
        'delta_a': float,
    },
    'state': {
        'dims': _int_list,
        'amplitudes': _complex_list,
        'eigenvalues': parse_list,
        'basis': _basis_rows,
    },
}

REQUIRED = ('dynamics', 'n_trajectories', 'master_seed', 'output')
COLLAPSE_SOURCES = ('scenario', 'named:pauli-z', 'named:number', 'diagonal',
                    'phi-basis:computational', 'phi-basis:bell', 'phi-basis:inline')
HAMILTONIAN_SOURCES = ('scenario', 'none')


@dataclass
class ExperimentConfig:
    """Validated experiment settings"""

    dynamics: str
    n_trajectories: int
    master_seed: int
    output: str
    scenario: str = None
    lam: float = None
    collapse_operator: str = 'scenario'
    xlsx: bool = False
    grid: dict = field(default_factory=dict)
    grw: dict = field(default_factory=dict)
    scenario_args: dict = field(default_factory=dict)
    state: dict = field(default_factory=dict)
    source: str = '<string>'
    lines: dict = field(default_factory=dict)

    def line_of(self, dotted_key):
        return self.lines.get(dotted_key)


def _locate_lines(text):
    """Map 'section.key' and 'section' to the line number they first appear on."""
    lines = {}
    section = None
    for number, raw in enumerate(text.splitlines(), start=1):
        header = re.match(r'^\s*\[([^\]]+)\]', raw)
        if header:
            section = header.group(1).strip()
            lines.setdefault(section, number)
            continue
        entry = re.match(r'^([^\s=:#;][^=:]*?)\s*[=:]', raw)
        if entry and section is not None:
            lines.setdefault(f"{section}.{entry.group(1).strip()}", number)
    return lines


def _check(result, key, lines):
    is_valid, message = result
    if not is_valid:
        raise ConfigError(message, key=key, line=lines.get(key))


def _read_sections(text, source, allowed):
    """Parse INI text, reject unknown sections and keys, convert values."""
    parser = configparser.ConfigParser(interpolation=None, strict=True,
                                       comment_prefixes=('#', ';'), inline_comment_prefixes=('#',))
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.DuplicateOptionError as e:
        raise ConfigError("duplicate key", key=f"{e.section}.{e.option}", line=e.lineno) from None
    except configparser.DuplicateSectionError as e:
        raise ConfigError("duplicate section", key=e.section, line=e.lineno) from None
    except configparser.MissingSectionHeaderError as e:
        raise ConfigError("content before the first [section] header", line=e.lineno) from None
    except configparser.ParsingError as e:
        line = e.errors[0][0] if e.errors else None
        raise ConfigError("malformed line", line=line) from None

    lines = _locate_lines(text)
    values = {}
    for section in parser.sections():
        if section not in allowed:
            raise ConfigError(f"unknown section [{section}]", key=section, line=lines.get(section))
        values[section] = {}
        for key, raw in parser.items(section):
            dotted = f"{section}.{key}"
            if key not in SCHEMA[section]:
                raise ConfigError("unknown key", key=dotted, line=lines.get(dotted))
            try:
                values[section][key] = SCHEMA[section][key](raw)
            except (ValueError, TypeError) as e:
                raise ConfigError(f"invalid value '{raw.strip()}': {e}", key=dotted, line=lines.get(dotted)) from None
    return values, lines


def parse_experiment_config(text, source='<string>'):
    """
    Parse and validate experiment config text

    Args:
        text: INI text
        source: name used in diagnostics

    Returns:
        ExperimentConfig

    Raises:
        ConfigError: with the offending key and line number
    """
    values, lines = _read_sections(text, source, SCHEMA)

    # Required keys
    experiment = values.get('experiment')
    if experiment is None:
        raise ConfigError("missing [experiment] section", key='experiment')
    for key in REQUIRED:
        if key not in experiment:
            raise ConfigError("required key is missing", key=f"experiment.{key}", line=lines.get('experiment'))

    config = ExperimentConfig(
        dynamics=experiment['dynamics'],
        n_trajectories=experiment['n_trajectories'],
        master_seed=experiment['master_seed'],
        output=experiment['output'],
        scenario=experiment.get('scenario'),
        lam=experiment.get('lambda'),
        collapse_operator=experiment.get('collapse_operator', 'scenario'),
        xlsx=experiment.get('xlsx', False),
        grid=values.get('grid', {}),
        grw=values.get('grw', {}),
        scenario_args=values.get('scenario', {}),
        state=values.get('state', {}),
        source=source,
        lines=lines,
    )
    validate_experiment_config(config)
    return config


def _read_file(path):
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            return handle.read()
    except OSError as e:
        raise ConfigError(f"cannot read config file: {e.strerror}", key=str(path)) from None


def load_experiment_config(path):
    """Read and parse a config file; unreadable files raise ConfigError."""
    return parse_experiment_config(_read_file(path), source=str(path))


def parse_state_config(text, source='<string>'):
    """
    Parse a state-only config (a single [state] section with dims and amplitudes)

    Returns:
        dict: converted [state] values
    """
    values, lines = _read_sections(text, source, ('state',))
    state = values.get('state')
    if not state:
        raise ConfigError("missing [state] section", key='state')
    for key in ('dims', 'amplitudes'):
        if key not in state:
            raise ConfigError("required key is missing", key=f"state.{key}", line=lines.get('state'))
    _check(validate_dims(state['dims']), 'state.dims', lines)
    total = 1
    for d in state['dims']:
        total *= d
    _check(validate_amplitudes(state['amplitudes'], total), 'state.amplitudes', lines)
    return state


def load_state_config(path):
    return parse_state_config(_read_file(path), source=str(path))


def validate_experiment_config(config):
    """Cross-field checks that the per-key converters cannot do."""
    lines = config.lines
    _check(validate_dynamics(config.dynamics), 'experiment.dynamics', lines)
    _check(validate_trajectory_count(config.n_trajectories), 'experiment.n_trajectories', lines)
    _check(validate_seed(config.master_seed), 'experiment.master_seed', lines)
    _check(validate_output_path(config.output), 'experiment.output', lines)
    if config.lam is not None:
        allow_zero = config.dynamics == 'csl-sde'
        _check(validate_positive('lambda', config.lam, allow_zero=allow_zero), 'experiment.lambda', lines)

    if config.collapse_operator not in COLLAPSE_SOURCES:
        raise ConfigError(f"collapse_operator must be one of {', '.join(COLLAPSE_SOURCES)}",
                          key='experiment.collapse_operator', line=lines.get('experiment.collapse_operator'))

    # Source of the initial state
    if config.scenario is None and 'amplitudes' not in config.state:
        raise ConfigError("either experiment.scenario or [state] amplitudes is required",
                          key='experiment.scenario', line=lines.get('experiment'))
    if config.scenario is None:
        if config.collapse_operator == 'scenario':
            raise ConfigError("an inline state needs an explicit collapse_operator",
                              key='experiment.collapse_operator', line=lines.get('experiment'))
        if config.lam is None:
            raise ConfigError("an inline state needs lambda", key='experiment.lambda', line=lines.get('experiment'))
    if config.scenario is not None:
        _check(validate_scenario_name(config.scenario, scenario_catalog.names()), 'experiment.scenario', lines)
    if config.scenario_args and config.scenario is None:
        raise ConfigError("[scenario] arguments given without experiment.scenario",
                          key='scenario', line=lines.get('scenario'))
    if config.state:
        dims = config.state.get('dims')
        if dims is None:
            raise ConfigError("[state] needs dims", key='state.dims', line=lines.get('state'))
        _check(validate_dims(dims), 'state.dims', lines)
        total = 1
        for d in dims:
            total *= d
        if 'amplitudes' in config.state:
            _check(validate_amplitudes(config.state['amplitudes'], total), 'state.amplitudes', lines)
        if 'eigenvalues' in config.state and len(config.state['eigenvalues']) != total:
            raise ConfigError(f"expected {total} eigenvalues", key='state.eigenvalues',
                              line=lines.get('state.eigenvalues'))
        if 'basis' in config.state and any(len(row) != total for row in config.state['basis']):
            raise ConfigError(f"every basis row needs {total} amplitudes", key='state.basis',
                              line=lines.get('state.basis'))
    if config.collapse_operator == 'diagonal' and 'eigenvalues' not in config.state:
        raise ConfigError("collapse_operator = diagonal needs [state] eigenvalues",
                          key='state.eigenvalues', line=lines.get('experiment.collapse_operator'))
    if config.collapse_operator == 'phi-basis:inline' and 'basis' not in config.state:
        raise ConfigError("collapse_operator = phi-basis:inline needs [state] basis",
                          key='state.basis', line=lines.get('experiment.collapse_operator'))

    _validate_grid(config)


def _require(config, section, key):
    store = config.grid if section == 'grid' else config.grw
    if key not in store:
        raise ConfigError(f"required for dynamics '{config.dynamics}'", key=f"{section}.{key}",
                          line=config.lines.get(section))
    return store[key]


def _reject(config, keys):
    for key in keys:
        if key in config.grid:
            raise ConfigError(f"not used by dynamics '{config.dynamics}'", key=f"grid.{key}",
                              line=config.lines.get(f"grid.{key}"))


def _validate_grid(config):
    lines = config.lines
    if config.dynamics == 'csl-closed':
        _reject(config, ('dt', 'steps', 'record_every', 'hamiltonian'))
        if 'times' in config.grid:
            if 't_final' in config.grid or 'n_points' in config.grid:
                raise ConfigError("give either times or t_final + n_points", key='grid.times',
                                  line=lines.get('grid.times'))
            _check(validate_time_grid(config.grid['times']), 'grid.times', lines)
        else:
            _check(validate_positive('t_final', _require(config, 'grid', 't_final')), 'grid.t_final', lines)
            if _require(config, 'grid', 'n_points') < 1:
                raise ConfigError("n_points must be at least 1", key='grid.n_points',
                                  line=lines.get('grid.n_points'))
    elif config.dynamics == 'csl-sde':
        _reject(config, ('times', 't_final', 'n_points'))
        _check(validate_positive('dt', _require(config, 'grid', 'dt')), 'grid.dt', lines)
        if _require(config, 'grid', 'steps') < 1:
            raise ConfigError("steps must be at least 1", key='grid.steps', line=lines.get('grid.steps'))
        if config.grid.get('record_every', 1) < 1:
            raise ConfigError("record_every must be at least 1", key='grid.record_every',
                              line=lines.get('grid.record_every'))
        if config.grid.get('hamiltonian', 'scenario') not in HAMILTONIAN_SOURCES:
            raise ConfigError(f"hamiltonian must be one of {', '.join(HAMILTONIAN_SOURCES)}",
                              key='grid.hamiltonian', line=lines.get('grid.hamiltonian'))
    else:
        _reject(config, ('times', 'n_points', 'steps', 'record_every'))
        _check(validate_positive('t_final', _require(config, 'grid', 't_final')), 'grid.t_final', lines)
        _check(validate_positive('dt', _require(config, 'grid', 'dt')), 'grid.dt', lines)
        _check(validate_positive('rate', _require(config, 'grw', 'rate'), allow_zero=True), 'grw.rate', lines)
        _check(validate_positive('smearing', _require(config, 'grw', 'smearing')), 'grw.smearing', lines)
    if config.dynamics != 'grw' and config.grw:
        raise ConfigError("[grw] is only used by dynamics 'grw'", key='grw', line=lines.get('grw'))
