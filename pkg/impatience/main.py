"""Command-line entry point."""
import argparse
import logging
import sys

from pydantic import ValidationError

from impatience.commands import register_commands
from impatience.core.config import settings
from impatience.core.errors import EXIT_USAGE, ConfigurationError, DivergenceError, ImpatienceError

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class CliParser(argparse.ArgumentParser):
    """Argument parser that reports usage errors as exceptions instead of exiting."""

    def error(self, message: str) -> None:
        raise ConfigurationError(f"{self.prog}: {message}")


def build_parser() -> CliParser:
    parser = CliParser(prog="impatience", description="Dual-queue jockeying and reneging experiments.")
    parser.add_argument("--config", help="experiment JSON document")
    parser.add_argument("--output-dir", help=f"output directory (default {settings.output_dir})")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--log-level", choices=("DEBUG", "INFO", "WARNING", "ERROR"))
    parser.add_argument("--workers", type=int, help="process-pool size for replications")
    subparsers = parser.add_subparsers(dest="command", required=True)
    register_commands(subparsers)
    return parser


def configure_logging(level: str) -> None:
    logging.basicConfig(level=level.upper(), format=LOG_FORMAT, stream=sys.stderr, force=True)


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ConfigurationError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    configure_logging(args.log_level or settings.log_level)
    try:
        return args.handler(args)
    except DivergenceError as exc:
        logger.error("Training diverged: %s", exc)
        return exc.exit_code
    except ImpatienceError as exc:
        logger.error("%s", exc)
        return exc.exit_code
    except ValidationError as exc:
        logger.error("Invalid configuration: %s", exc)
        return EXIT_USAGE
    except ValueError as exc:
        logger.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
