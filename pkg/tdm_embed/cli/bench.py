"""`bench`: seeded optimizer comparison on a synthetic graph family"""
import argparse
from pathlib import Path

from ..services.bench_service import BenchService
from .common import add_run_flags, build_config, path_option, require_path

FLAG_NAMES = (
    "family",
    "size",
    "optimizer",
    "alpha",
    "dims",
    "seed",
    "seeds",
    "iters",
    "converge-iters",
    "max-iter",
    "tol",
    "sym",
    "kappa-steps",
    "kappa-warmup",
    "lr-x",
    "lr-kappa",
    "jobs",
)


def cmd_bench(args: argparse.Namespace) -> int:
    config = build_config(args, FLAG_NAMES)
    BenchService(config).run(out=require_path(args, "out"), plot=path_option(args, "plot"))
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("bench", help="compare optimizers over seeded restarts")
    parser.add_argument("--out", type=Path, default=None, help="statistics JSON")
    parser.add_argument("--plot", type=Path, default=None, help="mean stress trajectory SVG")
    add_run_flags(parser, FLAG_NAMES)
    parser.set_defaults(handler=cmd_bench)
