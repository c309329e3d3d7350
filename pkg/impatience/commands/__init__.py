"""CLI sub-commands exposed by ``python -m impatience``."""
import argparse

from impatience.commands import asymptotics, estimate, simulate, train, version

COMMANDS = (simulate, train, asymptotics, estimate, version)


def register_commands(subparsers: argparse._SubParsersAction) -> None:
    for command in COMMANDS:
        command.register(subparsers)
