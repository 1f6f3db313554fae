"""Shared flag definitions and RunConfig layering for the sub-commands"""
import argparse
import json
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

from pydantic import ValidationError

from ..config import settings
from ..errors import InvalidConfig
from ..schemas import GraphFamily, IngestMode, InitMode, Optimizer, RunConfig, SymPolicy


class CliParser(argparse.ArgumentParser):
    """argparse with usage errors reported as configuration errors"""

    def error(self, message: str):
        raise InvalidConfig(f"{self.prog}: {message}")


# flag name -> argparse keyword arguments
FLAGS: Dict[str, Dict[str, Any]] = {
    "optimizer": dict(choices=[o.value for o in Optimizer]),
    "alpha": dict(type=int, help="weight exponent: w_ij = d_ij^-alpha"),
    "dims": dict(type=int),
    "seed": dict(type=int),
    "seeds": dict(type=int, help="number of seeded restarts"),
    "iters": dict(type=int, help="iteration budget (SGD schedule length)"),
    "converge-iters": dict(type=int, help="SGD schedule length of the converged bench run"),
    "max-iter": dict(type=int),
    "tol": dict(type=float, help="relative stress improvement that stops majorization"),
    "init": dict(choices=[i.value for i in InitMode]),
    "sym": dict(choices=[s.value for s in SymPolicy]),
    "ingest": dict(choices=[m.value for m in IngestMode]),
    "kappa-steps": dict(type=int),
    "kappa-warmup": dict(type=int, help="flat SGD passes before curvature learning starts"),
    "lr-x": dict(type=float),
    "lr-kappa": dict(type=float),
    "snapshots": dict(type=int, help="write this many evenly spaced k-layout snapshots"),
    "jobs": dict(type=int, help="worker processes, 0 = logical cores"),
    "family": dict(choices=[f.value for f in GraphFamily]),
    "size": dict(type=int, help="grid side, tree depth, or vertex count"),
}


def add_run_flags(parser: argparse.ArgumentParser, names: Iterable[str]) -> None:
    for name in names:
        parser.add_argument(f"--{name}", default=None, **FLAGS[name])
    parser.add_argument("--config", type=Path, default=None, help="JSON file with defaults for the flags above")


PATH_KEYS = ("out", "svg", "plot", "graph")


def settings_defaults() -> Dict[str, Any]:
    return {
        "alpha": settings.ALPHA,
        "dims": settings.DIMS,
        "seed": settings.SEED,
        "seeds": settings.SEEDS,
        "iters": settings.ITERS,
        "converge_iters": settings.CONVERGE_ITERS,
        "max_iter": settings.MAX_ITER,
        "tol": settings.TOL,
        "sym": settings.SYM,
        "ingest": settings.INGEST,
        "kappa_steps": settings.KAPPA_STEPS,
        "kappa_warmup": settings.KAPPA_WARMUP,
        "lr_x": settings.LR_X,
        "lr_kappa": settings.LR_KAPPA,
        "jobs": settings.JOBS,
    }


def _file_values(path: Optional[Path]) -> Dict[str, Any]:
    if path is None:
        return {}
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(payload, dict):
        raise InvalidConfig(f"{path}: config must be a JSON object")
    return {k.replace("-", "_"): v for k, v in payload.items()}


def build_config(args: argparse.Namespace, names: Iterable[str], **fixed: Any) -> RunConfig:
    """settings < --config file < explicit flags"""
    values = settings_defaults()
    values.update({k: v for k, v in _file_values(getattr(args, "config", None)).items() if k not in PATH_KEYS})
    for name in names:
        value = getattr(args, name.replace("-", "_"), None)
        if value is not None:
            values[name.replace("-", "_")] = value
    values.update(fixed)
    try:
        return RunConfig(**values)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first.get("loc", ())) or "config"
        raise InvalidConfig(f"{where}: {first.get('msg', 'invalid value')}") from exc


def path_option(args: argparse.Namespace, name: str) -> Optional[Path]:
    """Path flag, falling back to the same key in the --config file"""
    value = getattr(args, name, None)
    if value is None:
        value = _file_values(getattr(args, "config", None)).get(name)
    return Path(value) if value is not None else None


def require_path(args: argparse.Namespace, name: str) -> Path:
    path = path_option(args, name)
    if path is None:
        raise InvalidConfig(f"--{name} is required")
    return path
