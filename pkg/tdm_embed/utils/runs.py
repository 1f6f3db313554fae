"""Helpers shared by the iterative optimizers: seeded starts, run records, run statistics"""
from typing import Iterable, Sequence

import numpy as np

from ..errors import TooFewRuns
from ..models import RunRecord, RunStatistics, StressReport, TimeDistanceMatrix


def random_coords(d: TimeDistanceMatrix, dims: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform start in [-s, s]^D with s = max d_ij / 2"""
    s = float(d.d.max()) / 2.0 if d.n else 0.0
    return rng.uniform(-s, s, size=(d.n, dims))


def make_record(
    seed: int,
    optimizer: str,
    raw: Sequence[float],
    norm: Sequence[float],
    kappas: Iterable[float] = (),
    flags: Iterable[str] = (),
) -> RunRecord:
    return RunRecord(
        seed=seed,
        trajectory=tuple(float(v) for v in norm),
        trajectory_raw=tuple(float(v) for v in raw),
        final=StressReport(raw=float(raw[-1]), normalized=float(norm[-1])),
        iterations_used=len(norm),
        optimizer=optimizer,
        kappa_trajectory=tuple(float(k) for k in kappas),
        flags=tuple(sorted(set(flags))),
    )


def compare_runs(records: Sequence[RunRecord]) -> RunStatistics:
    """Mean, spread and coefficient of variation of the final normalized stress"""
    if len(records) < 2:
        raise TooFewRuns(f"need at least 2 runs to compare, got {len(records)}")
    finals = np.array([r.final.normalized for r in records], dtype=float)
    mean = float(finals.mean())
    std = float(finals.std())
    return RunStatistics(
        mean=mean,
        min=float(finals.min()),
        max=float(finals.max()),
        coefficient_of_variation=std / mean if mean > 0 else 0.0,
        count=len(records),
    )


def iterations_to_threshold(record: RunRecord, factor: float = 1.1) -> int:
    """First iteration (1-based) whose stress is within factor x of the run's final stress"""
    target = factor * record.final.normalized
    for t, value in enumerate(record.trajectory, start=1):
        if value <= target:
            return t
    return record.iterations_used


def median(values: Sequence[float]) -> float:
    return float(np.median(np.asarray(values, dtype=float))) if len(values) else 0.0


def truncate(record: RunRecord, iterations: int) -> RunRecord:
    """The same run as it stood after `iterations` iterations"""
    k = max(1, min(iterations, len(record.trajectory)))
    return make_record(
        record.seed,
        record.optimizer,
        record.trajectory_raw[:k],
        record.trajectory[:k],
        record.kappa_trajectory[:k],
        record.flags,
    )
