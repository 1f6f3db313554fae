"""`graph`: parse and validate a network file, write the road graph"""
import argparse
import logging
import sys
from pathlib import Path

from ..services.export_service import ExportService, dumps
from ..utils.road_graph import build_graph
from .common import add_run_flags, build_config, path_option

logger = logging.getLogger(__name__)

FLAG_NAMES = ("ingest",)


def cmd_graph(args: argparse.Namespace) -> int:
    config = build_config(args, FLAG_NAMES)
    graph = build_graph(ExportService.read_network(args.network), config.ingest)

    out = path_option(args, "out")
    if out is not None:
        ExportService.write_json(out, ExportService.graph_export(graph))
        logger.info(f"[GRAPH] wrote {out}")
    sys.stdout.write(dumps(ExportService.validation_report(graph)))
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("graph", help="validate a network file and export its road graph")
    parser.add_argument("network", type=Path)
    parser.add_argument("--out", type=Path, default=None)
    add_run_flags(parser, FLAG_NAMES)
    parser.set_defaults(handler=cmd_graph)
