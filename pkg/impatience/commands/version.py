"""Print the package version."""
import argparse

from impatience import __version__
from impatience.core.errors import EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("version", help="print the package version")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    print(f"impatience {__version__}")
    return EXIT_OK
