"""`embed`: network or matrix file -> layout, trajectory and optional SVG"""
import argparse
from pathlib import Path

from ..services.embedding_service import EmbeddingService
from .common import add_run_flags, build_config, path_option, require_path

FLAG_NAMES = (
    "optimizer",
    "alpha",
    "dims",
    "seed",
    "iters",
    "max-iter",
    "tol",
    "init",
    "sym",
    "ingest",
    "kappa-steps",
    "kappa-warmup",
    "lr-x",
    "lr-kappa",
    "snapshots",
)


def cmd_embed(args: argparse.Namespace) -> int:
    config = build_config(args, FLAG_NAMES)
    EmbeddingService(config).run(args.source, require_path(args, "out"), svg=path_option(args, "svg"))
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("embed", help="embed a network (.json) or time-distance matrix (.csv)")
    parser.add_argument("source", type=Path)
    parser.add_argument("--out", type=Path, default=None, help="layout JSON; the trajectory goes next to it")
    parser.add_argument("--svg", type=Path, default=None)
    add_run_flags(parser, FLAG_NAMES)
    parser.set_defaults(handler=cmd_embed)
