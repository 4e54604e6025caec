"""
Commands package initialization
Every subcommand is imported here and registered in app.py
"""

from dataclasses import dataclass
from typing import Callable


@dataclass(frozen=True)
class Command:
    """A CLI subcommand: its arguments and the handler that returns an exit code."""

    name: str
    help: str
    configure: Callable
    handler: Callable

    def register(self, subparsers):
        parser = subparsers.add_parser(self.name, help=self.help, description=self.help)
        self.configure(parser)
        parser.set_defaults(handler=self.handler)
        return parser


from .run import run_cmd  # noqa: E402
from .phi import phi_cmd  # noqa: E402
from .scenarios import scenarios_cmd  # noqa: E402
from .validate import validate_cmd  # noqa: E402

__all__ = [
    'Command',
    'run_cmd',
    'phi_cmd',
    'scenarios_cmd',
    'validate_cmd'
]
