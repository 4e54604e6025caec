"""
Collapse simulator - command-line entry point
Seeded CSL / GRW trajectory ensembles, Phi reports and scenario listing
"""

import argparse
import logging
import sys

from config import Config
from quantum.errors import ConfigError, NumericalAbortError, SimulationError

VERSION = '1.0.0'


class CliParser(argparse.ArgumentParser):
    """Usage errors exit with the config-error code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"❌ {message}", file=sys.stderr)
        raise SystemExit(1)


def configure_logging(level=None):
    """Configure root logging once from CSL_LOG_LEVEL (or an explicit level)."""
    logging.basicConfig(
        level=getattr(logging, (level or Config.CSL_LOG_LEVEL).upper(), logging.INFO),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        force=True,
    )


def register_commands(subparsers):
    """Register all subcommands"""
    from commands.run import run_cmd
    from commands.phi import phi_cmd
    from commands.scenarios import scenarios_cmd
    from commands.validate import validate_cmd

    run_cmd.register(subparsers)
    phi_cmd.register(subparsers)
    scenarios_cmd.register(subparsers)
    validate_cmd.register(subparsers)


def create_parser():
    parser = CliParser(prog='csl-sim', description=__doc__.strip().splitlines()[1])
    parser.add_argument('--version', action='version', version=f'%(prog)s {VERSION}')
    parser.add_argument('--log-level', default=None, help='override CSL_LOG_LEVEL')
    subparsers = parser.add_subparsers(dest='command', parser_class=CliParser)
    register_commands(subparsers)
    return parser


def main(argv=None):
    """
    Parse arguments and dispatch

    Returns:
        int: 0 success, 1 config error, 2 numerical failure
    """
    parser = create_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)

    if not Config.validate():
        return 1

    handler = getattr(args, 'handler', None)
    if handler is None:
        parser.print_help()
        return 1

    try:
        return handler(args)
    except ConfigError as e:
        print(f"❌ Config error: {e}", file=sys.stderr)
        return 1
    except NumericalAbortError as e:
        print(f"❌ Numerical failure: {e}", file=sys.stderr)
        return 2
    except SimulationError as e:
        print(f"❌ Simulation failed: {e}", file=sys.stderr)
        return 2


if __name__ == '__main__':
    sys.exit(main())
