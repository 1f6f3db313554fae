"""`render`: draw a layout or k-layout over its road graph"""
import argparse
from pathlib import Path

from ..services.export_service import ExportService
from ..services.render_service import RenderService
from ..utils.road_graph import build_graph, parse_network
from .common import add_run_flags, build_config, require_path

FLAG_NAMES = ("ingest",)


def load_graph(path: Path, ingest):
    """Network file (has "segments") or a graph file written by `graph`"""
    payload = ExportService.read_json(path)
    if isinstance(payload, dict) and "segments" in payload:
        return build_graph(parse_network(Path(path).read_bytes()), ingest)
    return ExportService.graph_from_payload(payload)


def cmd_render(args: argparse.Namespace) -> int:
    config = build_config(args, FLAG_NAMES)
    graph = load_graph(require_path(args, "graph"), config.ingest)
    layout = ExportService.read_layout(args.layout, order=graph.vertices)
    RenderService.render_svg(layout, graph, require_path(args, "out"))
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("render", help="draw a layout as SVG")
    parser.add_argument("layout", type=Path)
    parser.add_argument("--graph", type=Path, default=None, help="network file or graph JSON")
    parser.add_argument("--out", type=Path, default=None)
    add_run_flags(parser, FLAG_NAMES)
    parser.set_defaults(handler=cmd_render)
