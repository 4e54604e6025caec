"""
scenarios subcommand
Lists the scenario catalog
"""

from quantum import scenario_catalog

from . import Command


def configure(parser):
    pass


def handle(args):
    print("Available scenarios:")
    for name, description, parameters in scenario_catalog.describe():
        print(f"  {name:<22} {description}")
        print(f"  {'':<22} [scenario] keys: {', '.join(parameters)}")
    return 0


scenarios_cmd = Command('scenarios', 'list the scenario catalog', configure, handle)
