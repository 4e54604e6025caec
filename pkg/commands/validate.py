"""
validate subcommand
Checks an experiment config without running it
"""

from utils.config_file import load_experiment_config

from . import Command
from .run import build_trajectory_spec


def configure(parser):
    parser.add_argument('config', help='experiment config (INI)')


def handle(args):
    config = load_experiment_config(args.config)
    spec = build_trajectory_spec(config)
    print(f"✅ {args.config}: valid ({spec.dynamics}, {config.n_trajectories} trajectories, "
          f"dimension {spec.psi0.dim})")
    return 0


validate_cmd = Command('validate', 'check an experiment config without running it', configure, handle)
