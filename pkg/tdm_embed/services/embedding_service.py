"""Embedding pipeline: network or matrix file -> distances -> layout and trajectory"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple, Union

from ..models import KLayout, Layout, RoadGraph, RunRecord, TimeDistanceMatrix, WeightMatrix
from ..schemas import Optimizer, RunConfig
from ..utils.classical import classical_mds
from ..utils.kspace import optimize_joint
from ..utils.majorization import run_majorization
from ..utils.metric import all_pairs_times, symmetrize, weights
from ..utils.road_graph import build_graph
from ..utils.runs import make_record
from ..utils.sgd import run_sgd, schedule_for
from ..utils.stress import stress
from .export_service import ExportService
from .render_service import RenderService

logger = logging.getLogger(__name__)


@dataclass
class EmbeddingResult:
    layout: Union[Layout, KLayout]
    record: RunRecord
    snapshots: List[Tuple[int, KLayout]] = field(default_factory=list)


class EmbeddingService:
    """Runs one configured optimizer on one input"""

    def __init__(self, config: RunConfig):
        self.config = config

    def load(self, source: Path) -> Tuple[TimeDistanceMatrix, Optional[RoadGraph]]:
        """Matrix CSV (.csv) or network JSON; returns the symmetric distances and the graph if any"""
        source = Path(source)
        if source.suffix.lower() == ".csv":
            m, ids = ExportService.read_matrix_csv(source)
            return symmetrize(m, self.config.sym, ids), None

        graph = build_graph(ExportService.read_network(source), self.config.ingest)
        times = all_pairs_times(graph)
        d = symmetrize(times, self.config.sym, graph.vertices)
        logger.info(f"[METRIC] {d.n} vertices symmetrized with policy {self.config.sym.value}")
        return d, graph

    def embed(self, d: TimeDistanceMatrix) -> EmbeddingResult:
        cfg = self.config
        w: WeightMatrix = weights(d, cfg.alpha)

        if cfg.optimizer == Optimizer.CLASSICAL:
            layout = classical_mds(d, cfg.dims)
            report = stress(layout, d, w)
            record = make_record(cfg.seed, cfg.optimizer.value, [report.raw], [report.normalized])
            return EmbeddingResult(layout, record)

        if cfg.optimizer == Optimizer.MAJORIZATION:
            layout, record = run_majorization(d, w, cfg.dims, init=cfg.init, max_iter=cfg.max_iter, tol=cfg.tol, seed=cfg.seed)
            return EmbeddingResult(layout, record)

        if cfg.optimizer == Optimizer.SGD:
            layout, record = run_sgd(d, w, cfg.dims, schedule_for(w, cfg.iters), seed=cfg.seed)
            return EmbeddingResult(layout, record)

        snapshots: List[Tuple[int, KLayout]] = []
        every = max(1, cfg.kappa_steps // cfg.snapshots) if cfg.snapshots else 0
        klayout, record = optimize_joint(
            d, w, cfg.dims,
            seed=cfg.seed,
            steps=cfg.kappa_steps,
            lr_x=cfg.lr_x,
            lr_kappa=cfg.lr_kappa,
            warmup=cfg.kappa_warmup,
            observer=lambda step, kl: snapshots.append((step, kl)),
            every=every,
        )
        return EmbeddingResult(klayout, record, snapshots[: cfg.snapshots])

    def run(self, source: Path, out: Path, svg: Optional[Path] = None) -> EmbeddingResult:
        """Embed `source` and write layout, trajectory, snapshots and the optional drawing next to `out`"""
        out = Path(out)
        d, graph = self.load(source)
        result = self.embed(d)

        ExportService.write_layout(out, result.layout)
        ExportService.write_trajectory(trajectory_path(out), result.record)
        for step, kl in result.snapshots:
            ExportService.write_layout(out.with_name(f"{out.stem}.step{step:06d}.json"), kl)

        if svg is not None:
            RenderService.render_svg(result.layout, graph if graph is not None else matrix_graph(d), Path(svg))

        logger.info(
            f"[EMBED] {self.config.optimizer.value}: {result.record.iterations_used} iterations, "
            f"normalized stress {result.record.final.normalized:.6g}"
        )
        return result


def trajectory_path(out: Path) -> Path:
    return Path(out).with_name(f"{Path(out).stem}.trajectory.jsonl")


def matrix_graph(d: TimeDistanceMatrix) -> RoadGraph:
    """Edge-free graph over the matrix ids, for drawing matrix inputs"""
    return RoadGraph(vertices=d.ids, arcs=(), entries=frozenset(), exits=frozenset())
