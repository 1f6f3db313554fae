"""Optimizer benchmark over seeded restarts on a synthetic graph family"""
import concurrent.futures
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from ..errors import InvalidConfig, TooFewRuns
from ..models import RunRecord, TimeDistanceMatrix, WeightMatrix
from ..schemas import (
    BenchReport,
    InitMode,
    Optimizer,
    OptimizerBench,
    RunConfig,
    RunSummary,
    StatsExport,
)
from ..utils.classical import classical_mds
from ..utils.families import family_network
from ..utils.kspace import optimize_joint
from ..utils.majorization import run_majorization
from ..utils.metric import all_pairs_times, symmetrize, weights
from ..utils.road_graph import build_graph
from ..utils.runs import compare_runs, iterations_to_threshold, make_record, median, truncate
from ..utils.sgd import run_sgd, schedule_for
from ..utils.stress import stress
from .export_service import ExportService
from .render_service import RenderService

logger = logging.getLogger(__name__)

THRESHOLD_FACTOR = 1.1

# (budget record, converged record) per optimizer
SeedResult = Tuple[int, Dict[str, Tuple[RunRecord, RunRecord]]]

_worker_problem: Optional["BenchProblem"] = None


@dataclass(frozen=True)
class BenchProblem:
    d: TimeDistanceMatrix
    w: WeightMatrix
    config: RunConfig
    optimizers: Tuple[str, ...]


def bench_optimizers(config: RunConfig) -> Tuple[str, ...]:
    names = [Optimizer.CLASSICAL.value, Optimizer.MAJORIZATION.value, Optimizer.SGD.value]
    if config.optimizer == Optimizer.KAPPA_JOINT:
        names.append(Optimizer.KAPPA_JOINT.value)
    return tuple(names)


def run_seed(problem: BenchProblem, seed: int) -> SeedResult:
    """Budget and converged runs of every optimizer from one seed"""
    d, w, cfg = problem.d, problem.w, problem.config
    out: Dict[str, Tuple[RunRecord, RunRecord]] = {}
    for name in problem.optimizers:
        if name == Optimizer.CLASSICAL.value:
            rep = stress(classical_mds(d, min(cfg.dims, d.n)), d, w)
            rec = make_record(seed, name, [rep.raw], [rep.normalized])
            out[name] = (rec, rec)
        elif name == Optimizer.MAJORIZATION.value:
            _, rec = run_majorization(d, w, cfg.dims, init=InitMode.RANDOM, max_iter=cfg.max_iter, tol=cfg.tol, seed=seed)
            out[name] = (truncate(rec, cfg.iters), rec)
        elif name == Optimizer.SGD.value:
            _, budget = run_sgd(d, w, cfg.dims, schedule_for(w, cfg.iters), seed=seed)
            _, converged = run_sgd(d, w, cfg.dims, schedule_for(w, cfg.converge_iters), seed=seed)
            out[name] = (budget, converged)
        else:
            _, rec = optimize_joint(
                d, w, cfg.dims,
                seed=seed,
                steps=cfg.kappa_steps,
                lr_x=cfg.lr_x,
                lr_kappa=cfg.lr_kappa,
                warmup=cfg.kappa_warmup,
            )
            out[name] = (truncate(rec, cfg.iters), rec)
    return seed, out


def _init_worker(problem: BenchProblem) -> None:
    global _worker_problem
    _worker_problem = problem


def _run_seed_in_worker(seed: int) -> SeedResult:
    return run_seed(_worker_problem, seed)


def _stats(records: Sequence[RunRecord], best: float) -> StatsExport:
    s = compare_runs(records)
    return StatsExport(
        mean=s.mean,
        min=s.min,
        max=s.max,
        cv=s.coefficient_of_variation,
        mean_relative_to_best=s.mean / best if best > 0 else 1.0,
    )


def _summary(rec: RunRecord) -> RunSummary:
    return RunSummary(
        seed=rec.seed,
        final_raw=rec.final.raw,
        final_norm=rec.final.normalized,
        iterations_used=rec.iterations_used,
        kappa_final=rec.kappa_trajectory[-1] if rec.kappa_trajectory else None,
        flags=list(rec.flags),
    )


class BenchService:
    """Fans seeded runs over a process pool and aggregates them"""

    def __init__(self, config: RunConfig):
        if config.family is None:
            raise InvalidConfig("bench needs a graph family (--family grid|tree|cycle|complete)")
        if config.seeds < 2:
            raise TooFewRuns(f"bench needs at least 2 seeds, got {config.seeds}")
        self.config = config

    def problem(self) -> BenchProblem:
        cfg = self.config
        graph = build_graph(family_network(cfg.family, cfg.size))
        d = symmetrize(all_pairs_times(graph), cfg.sym, graph.vertices)
        return BenchProblem(d=d, w=weights(d, cfg.alpha), config=cfg, optimizers=bench_optimizers(cfg))

    def workers(self) -> int:
        jobs = self.config.jobs or os.cpu_count() or 1
        return max(1, min(jobs, self.config.seeds))

    def collect(self, problem: BenchProblem) -> List[SeedResult]:
        seeds = list(range(self.config.seed, self.config.seed + self.config.seeds))
        workers = self.workers()
        logger.info(f"[BENCH] {len(seeds)} seeds x {len(problem.optimizers)} optimizers on {workers} worker(s)")
        if workers < 2:
            results = [run_seed(problem, s) for s in seeds]
        else:
            with concurrent.futures.ProcessPoolExecutor(
                max_workers=workers,
                initializer=_init_worker,
                initargs=(problem,),
            ) as executor:
                results = list(executor.map(_run_seed_in_worker, seeds))
        return sorted(results, key=lambda r: r[0])

    def report(self, problem: BenchProblem, results: List[SeedResult]) -> BenchReport:
        cfg = self.config
        best = min(conv.final.normalized for _, per in results for _, conv in per.values())

        optimizers: Dict[str, OptimizerBench] = {}
        for name in problem.optimizers:
            budget = [per[name][0] for _, per in results]
            converged = [per[name][1] for _, per in results]
            reached = [iterations_to_threshold(r, THRESHOLD_FACTOR) for r in converged]
            optimizers[name] = OptimizerBench(
                budget=_stats(budget, best),
                converged=_stats(converged, best),
                median_iterations_to_threshold=median(reached),
                iterations_to_threshold=reached,
                runs=[_summary(r) for r in budget],
                converged_runs=[_summary(r) for r in converged],
            )
            logger.info(
                f"[BENCH] {name}: budget mean {optimizers[name].budget.mean:.6g} cv {optimizers[name].budget.cv:.4g}, "
                f"converged mean {optimizers[name].converged.mean:.6g}, median iterations {optimizers[name].median_iterations_to_threshold:g}"
            )

        return BenchReport(
            family=cfg.family,
            size=cfg.size,
            vertex_count=problem.d.n,
            alpha=cfg.alpha,
            dims=cfg.dims,
            seeds=[seed for seed, _ in results],
            budget_iterations=cfg.iters,
            threshold_factor=THRESHOLD_FACTOR,
            optimizers=optimizers,
        )

    def run(self, out: Optional[Path] = None, plot: Optional[Path] = None) -> BenchReport:
        problem = self.problem()
        results = self.collect(problem)
        report = self.report(problem, results)

        if out is not None:
            ExportService.write_json(out, report)
        if plot is not None:
            series = {name: RenderService.mean_trajectory([per[name][1] for _, per in results]) for name in problem.optimizers}
            ExportService.write_text(plot, RenderService.trajectory_svg(series))
        return report
