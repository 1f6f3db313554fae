"""Stochastic gradient descent over vertex pairs (SGD-MDS)"""
import logging
from typing import List, Optional, Tuple

import numpy as np

from ..config import settings
from ..errors import CoincidentPoints, DimensionMismatch
from ..models import Layout, RunRecord, SgdSchedule, TimeDistanceMatrix, WeightMatrix
from .runs import make_record, random_coords
from .stress import COINCIDENCE_EPS, normalizer, raw_stress

logger = logging.getLogger(__name__)

SCHEDULE_EPSILON = 0.1


def schedule_for(w: WeightMatrix, iterations: int = 15, epsilon: float = SCHEDULE_EPSILON) -> SgdSchedule:
    """Exponential annealing from 1/w_min down to epsilon/w_max"""
    iu = np.triu_indices(w.n, 1)
    positive = w.w[iu][w.w[iu] > 0]
    if positive.size == 0:
        return SgdSchedule(eta_max=1.0, eta_min=1.0, iterations=iterations)
    return SgdSchedule(
        eta_max=1.0 / float(positive.min()),
        eta_min=epsilon / float(positive.max()),
        iterations=iterations,
    )


def _move_pair(
    coords: np.ndarray,
    i: int,
    j: int,
    d_ij: float,
    mu: float,
    rng: Optional[np.random.Generator] = None,
) -> None:
    """Move X_i and X_j symmetrically along their difference, in place"""
    diff = coords[i] - coords[j]
    dist = float(np.sqrt(diff @ diff))
    if dist < COINCIDENCE_EPS:
        if rng is None:
            raise CoincidentPoints(i, j)
        diff = rng.normal(size=coords.shape[1])
        diff /= np.linalg.norm(diff)
        dist = 1.0
    r = ((dist - d_ij) / 2.0) * diff / dist
    coords[i] -= mu * r
    coords[j] += mu * r


def sgd_step(x: Layout, i: int, j: int, d_ij: float, w_ij: float, eta: float) -> Layout:
    """Single pair update with step mu = min(w_ij * eta, 1)"""
    if not (0 <= i < x.n and 0 <= j < x.n) or i == j:
        raise DimensionMismatch(f"invalid pair ({i}, {j}) for {x.n} points")
    coords = np.array(x.coords, copy=True)
    _move_pair(coords, i, j, d_ij, min(w_ij * eta, 1.0))
    return Layout(coords=coords, ids=x.ids)


def _pairs(w: WeightMatrix) -> List[Tuple[int, int]]:
    iu, ju = np.triu_indices(w.n, 1)
    keep = w.w[iu, ju] > 0
    return list(zip(iu[keep].tolist(), ju[keep].tolist()))


def run_sgd(
    d: TimeDistanceMatrix,
    w: WeightMatrix,
    dims: int,
    schedule: SgdSchedule,
    seed: int = 0,
) -> Tuple[Layout, RunRecord]:
    """Seeded random start, then one shuffled pass over all pairs per iteration"""
    if d.n != w.n:
        raise DimensionMismatch(f"distances cover {d.n} vertices, weights {w.n}")
    rng = np.random.default_rng(seed)
    coords = random_coords(d, dims, rng)
    norm = normalizer(d, w)

    pairs = _pairs(w)
    dvals = [float(d.d[i, j]) for i, j in pairs]
    wvals = [float(w.w[i, j]) for i, j in pairs]

    raws, norms = [], []
    for t in range(schedule.iterations):
        eta = schedule.eta(t)
        for k in rng.permutation(len(pairs)):
            i, j = pairs[k]
            _move_pair(coords, i, j, dvals[k], min(wvals[k] * eta, 1.0), rng)

        if settings.DEBUG:
            assert np.all(np.isfinite(coords)), f"non-finite coordinates after iteration {t}"
        cur = raw_stress(coords, d.d, w.w)
        raws.append(cur)
        norms.append(cur / norm if norm > 0 else 0.0)
        logger.debug(f"[SGD] seed={seed} iter {t + 1} eta={eta:.4g} stress={cur:.10g}")

    record = make_record(seed, "sgd", raws, norms)
    logger.info(f"[SGD] seed={seed} {schedule.iterations} iterations, normalized stress {record.final.normalized:.6g}")
    return Layout(coords=coords, ids=d.ids), record
