"""
phi subcommand
Reports Phi per grain and Phi^Max for a named state or a [state] config
"""

import logging
import os

import numpy as np

from quantum import StateVector, SubsystemLayout, phi_by_grain, phi_max
from quantum.errors import ConfigError, SimulationError
from quantum.integrated_information import ENTANGLEMENT_MEASURES, NAMED_STATES, named_state
from utils.config_file import load_state_config
from utils.helpers import format_number
from utils.result_writer import PHI_HEADER, phi_report_rows, write_phi_report

from . import Command

logger = logging.getLogger(__name__)


def resolve_state(target):
    """Named state, or the [state] section of an INI file."""
    if target in NAMED_STATES:
        return named_state(target)
    if not os.path.exists(target):
        raise ConfigError(f"'{target}' is neither a named state ({', '.join(NAMED_STATES)}) nor a file",
                          key='state')
    state = load_state_config(target)
    layout = SubsystemLayout(tuple(state['dims']))
    try:
        return StateVector.from_amplitudes(np.array(state['amplitudes'], dtype=complex), layout)
    except SimulationError as e:
        raise ConfigError(str(e), key='state.amplitudes') from None


def phi_report(state, measure='von-neumann'):
    """
    Per-grain Phi rows and the Phi^Max result

    Returns:
        tuple: (grain rows, PhiResult)
    """
    rows = phi_by_grain(state, measure)
    return rows, phi_max(state, measure)


def format_report(rows, result):
    """Plain-text table of a Phi report."""
    table = [PHI_HEADER] + phi_report_rows(rows, result)
    widths = [max(len(str(row[i])) for row in table) for i in range(len(PHI_HEADER))]
    lines = []
    for k, row in enumerate(table):
        lines.append('  '.join(str(cell).ljust(w) for cell, w in zip(row, widths)).rstrip())
        if k == 0:
            lines.append('  '.join('-' * w for w in widths))
    return '\n'.join(lines)


def configure(parser):
    parser.add_argument('state', help=f"named state ({', '.join(NAMED_STATES)}) or INI file with [state]")
    parser.add_argument('--measure', default='von-neumann', choices=sorted(ENTANGLEMENT_MEASURES),
                        help='entanglement measure (default: von-neumann)')
    parser.add_argument('--output', default=None, help='write the report as CSV')


def handle(args):
    state = resolve_state(args.state)
    rows, result = phi_report(state, args.measure)
    print(format_report(rows, result))
    print(f"\nPhi^Max = {format_number(result.phi)} nats")
    if args.output:
        write_phi_report(args.output, rows, result)
        print(f"✅ Report written to {args.output}")
    return 0


phi_cmd = Command('phi', 'report Phi per grain and Phi^Max of a state', configure, handle)
