"""
run subcommand
Executes an experiment config and writes the result table, summary and optional workbook
"""

import logging
import os
import time

import numpy as np

from config import Config
from quantum import (
    CslParams,
    HermitianOperator,
    PhiBasisSpec,
    StateVector,
    SubsystemLayout,
    TrajectorySpec,
    build_phi_operator,
    embed_operator,
    ensemble_service,
    scenario_catalog,
)
from quantum.errors import ConfigError, SimulationError
from quantum.hilbert import number_operator, pauli_z
from quantum.integrated_information import bell_basis
from utils.config_file import load_experiment_config
from utils.excel_export import export_workbook, xlsx_path
from utils.helpers import format_duration
from utils.result_writer import write_results

from . import Command

logger = logging.getLogger(__name__)


def resolve_output_path(path):
    """Bare file names go under CSL_OUTPUT_DIR; anything with a directory is used as given."""
    if os.path.isabs(path) or os.path.dirname(path):
        return path
    return os.path.join(Config.CSL_OUTPUT_DIR, path)


def _inline_state(config):
    layout = SubsystemLayout(tuple(config.state['dims']))
    return StateVector.from_amplitudes(np.array(config.state['amplitudes'], dtype=complex), layout)


def _collapse_operator(config, layout, scenario):
    source = config.collapse_operator
    if source == 'scenario':
        return scenario.collapse_op
    if source == 'named:pauli-z':
        if layout.dims[0] != 2:
            raise ConfigError("pauli-z needs a two-level first subsystem", key='experiment.collapse_operator',
                              line=config.line_of('experiment.collapse_operator'))
        return HermitianOperator(embed_operator(pauli_z(), [0], layout), layout)
    if source == 'named:number':
        return HermitianOperator(number_operator(layout.total_dim), layout)
    if source == 'diagonal':
        return HermitianOperator.diagonal(config.state['eigenvalues'], layout)
    if source == 'phi-basis:computational':
        return build_phi_operator(PhiBasisSpec.computational(layout))
    if source == 'phi-basis:bell':
        if layout.dims != (2, 2):
            raise ConfigError("the Bell basis needs a two-qubit register", key='experiment.collapse_operator',
                              line=config.line_of('experiment.collapse_operator'))
        return build_phi_operator(PhiBasisSpec(layout, tuple(StateVector(s.amplitudes, layout)
                                                              for s in bell_basis().basis_states)))
    rows = [StateVector(np.array(row, dtype=complex), layout) for row in config.state['basis']]
    return build_phi_operator(PhiBasisSpec(layout, tuple(rows)))


def _time_grid(grid):
    if 'times' in grid:
        return tuple(grid['times'])
    t_final, n_points = grid['t_final'], grid['n_points']
    return tuple(np.linspace(t_final / n_points, t_final, n_points))


def build_trajectory_spec(config):
    """
    Turn a validated ExperimentConfig into a TrajectorySpec

    Raises:
        ConfigError: when the scenario or state cannot be built from the given values
    """
    scenario = None
    try:
        # Step 1: initial state and default collapse model
        if config.scenario is not None:
            scenario = scenario_catalog.build(config.scenario, **config.scenario_args)
            psi0 = scenario.tracked_state
        else:
            psi0 = _inline_state(config)
        layout = psi0.layout

        # Step 2: collapse operator and strength
        collapse_op = _collapse_operator(config, layout, scenario)
        lam = config.lam if config.lam is not None else scenario.params.lam
        params = CslParams(lam, collapse_op)

        # Step 3: dynamics-specific settings
        hamiltonian = scenario.hamiltonian if scenario is not None else None
        grid = config.grid
        name = config.scenario or 'inline'
        if config.dynamics == 'csl-closed':
            return TrajectorySpec('csl-closed', psi0, params, hamiltonian=hamiltonian,
                                  time_grid=_time_grid(grid), name=name)
        if config.dynamics == 'csl-sde':
            if grid.get('hamiltonian', 'scenario') == 'none':
                hamiltonian = None
            return TrajectorySpec('csl-sde', psi0, params, hamiltonian=hamiltonian, dt=grid['dt'],
                                  n_steps=grid['steps'], record_every=grid.get('record_every', 1), name=name)
        return TrajectorySpec('grw', psi0, params, hamiltonian=hamiltonian, dt=grid['dt'],
                              t_final=grid['t_final'], grw_rate=config.grw['rate'],
                              grw_smearing=config.grw['smearing'], name=name)
    except ConfigError:
        raise
    except (SimulationError, ValueError) as e:
        key = 'scenario' if config.scenario is not None else 'state'
        raise ConfigError(str(e), key=key, line=config.line_of(key)) from None


def build_summary(config, spec, stats):
    summary = stats.to_summary()
    summary['scenario'] = config.scenario or 'inline'
    summary['lambda'] = spec.params.lam
    summary['collapse_operator'] = config.collapse_operator
    return summary


def configure(parser):
    parser.add_argument('config', help='experiment config (INI)')
    parser.add_argument('--workers', type=int, default=None,
                        help='worker threads (overrides CSL_WORKERS)')
    parser.add_argument('--output', default=None, help='override experiment.output')


def handle(args):
    """Run an experiment; returns the process exit code."""
    started = time.perf_counter()
    config = load_experiment_config(args.config)
    spec = build_trajectory_spec(config)
    output = resolve_output_path(args.output or config.output)

    records, stats = ensemble_service.run(spec, config.n_trajectories, config.master_seed,
                                          workers=args.workers)
    summary = build_summary(config, spec, stats)
    csv_path, json_path, row_count = write_results(output, records, summary)
    print(f"✅ {row_count} rows written to {csv_path}")
    print(f"✅ Summary written to {json_path}")

    if config.xlsx:
        workbook = export_workbook(xlsx_path(output), records, summary)
        print(f"✅ Workbook written to {workbook}")

    counts = ', '.join(str(c) for c in stats.counts)
    print(f"   counts [{counts}]  chi2={stats.chi_square:.4g}  p={stats.p_value:.4g}  "
          f"({format_duration(time.perf_counter() - started)})")
    return 0


run_cmd = Command('run', 'run an experiment config', configure, handle)
