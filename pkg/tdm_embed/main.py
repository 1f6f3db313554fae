"""Command-line entry point"""
import logging
import sys
from typing import List, Optional

from .cli import bench, embed, graph, render
from .cli.common import CliParser
from .config import check_settings, configure_logging, settings
from .errors import EmbeddingError

logger = logging.getLogger(__name__)


def build_parser() -> CliParser:
    parser = CliParser(prog=settings.APP_NAME, description="Time-distance maps of road networks")
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    # Register commands
    graph.register(subparsers)
    embed.register(subparsers)
    bench.register(subparsers)
    render.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command; every failure ends as a single `Code: detail` line on stderr"""
    configure_logging()
    try:
        check_settings()
        args = build_parser().parse_args(argv)
        return args.handler(args)
    except EmbeddingError as exc:
        logger.debug(f"[CLI] {exc.code}", exc_info=True)
        print(exc.line(), file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        detail = f"{exc.strerror or exc}: {exc.filename}" if exc.filename else str(exc)
        print(f"IOError: {' '.join(detail.split())}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
