"""Stress majorization with localized (per-vertex) updates"""
import logging
from typing import Optional, Tuple, Union

import numpy as np

from ..config import settings
from ..errors import CoincidentPoints, DimensionMismatch
from ..models import Layout, MajorizationState, RunRecord, TimeDistanceMatrix, WeightMatrix
from ..schemas import InitMode
from .classical import classical_mds
from .runs import make_record, random_coords
from .stress import COINCIDENCE_EPS, normalizer, pairwise_distances, raw_stress

logger = logging.getLogger(__name__)

# relative stress treated as an exact fit
EXACT_FIT = 1e-20


def _first_coincident(dist: np.ndarray) -> Optional[Tuple[int, int]]:
    close = dist < COINCIDENCE_EPS
    np.fill_diagonal(close, False)
    if close.any():
        i, j = np.argwhere(close)[0]
        return int(i), int(j)
    return None


def majorization_state(z_ref: Layout, d: TimeDistanceMatrix, w: WeightMatrix, strict: bool = True) -> MajorizationState:
    """Laplacians L^w and L^Z of the quadratic bound that touches stress at z_ref.

    With strict=False coincident pairs get L^Z_ij = 0 instead of raising.
    """
    n = z_ref.n
    if d.n != n or w.n != n:
        raise DimensionMismatch(f"layout has {n} points, distances {d.n}, weights {w.n}")

    lw = -w.w.copy()
    np.fill_diagonal(lw, 0.0)
    np.fill_diagonal(lw, -lw.sum(axis=1))

    dist = pairwise_distances(z_ref.coords)
    pair = _first_coincident(dist)
    if pair is not None and strict:
        raise CoincidentPoints(*pair)

    safe = np.where(dist < COINCIDENCE_EPS, np.inf, dist)
    lz = -w.w * d.d / safe
    np.fill_diagonal(lz, 0.0)
    np.fill_diagonal(lz, -lz.sum(axis=1))
    return MajorizationState(z_ref=z_ref, lw=lw, lz=lz)


def bound_fz(x: Layout, state: MajorizationState, d: TimeDistanceMatrix, w: WeightMatrix) -> float:
    """F^Z(X) = sum w d^2 + Tr(X^T L^w X) - 2 Tr(X^T L^Z Z) >= stress(X)"""
    pair = _first_coincident(pairwise_distances(state.z_ref.coords))
    if pair is not None:
        raise CoincidentPoints(*pair)
    if x.coords.shape != state.z_ref.coords.shape:
        raise DimensionMismatch(f"layout shape {x.coords.shape} vs reference {state.z_ref.coords.shape}")

    X = x.coords
    Z = state.z_ref.coords
    return normalizer(d, w) + float(np.trace(X.T @ state.lw @ X)) - 2.0 * float(np.trace(X.T @ state.lz @ Z))


def _directions(Z: np.ndarray, rng: Optional[np.random.Generator]) -> np.ndarray:
    """Unit vectors (Z_i - Z_j)/|Z_i - Z_j|; coincident pairs get a random direction if rng is given"""
    diff = Z[:, None, :] - Z[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    np.fill_diagonal(dist, 1.0)

    close = dist < COINCIDENCE_EPS
    if close.any():
        if rng is None:
            i, j = np.argwhere(close)[0]
            raise CoincidentPoints(int(i), int(j))
        dist = np.where(close, 1.0, dist)
        for i, j in np.argwhere(np.triu(close, 1)):
            u = rng.normal(size=Z.shape[1])
            u /= np.linalg.norm(u)
            diff[i, j] = u
            diff[j, i] = -u
        logger.warning(f"[SMACOF] {int(np.triu(close, 1).sum())} coincident pairs given random directions")

    return diff / dist[:, :, None]


def majorize_step(
    state: MajorizationState,
    d: TimeDistanceMatrix,
    w: WeightMatrix,
    rng: Optional[np.random.Generator] = None,
) -> Layout:
    """One sweep of per-vertex minimizers of F^Z in fixed vertex order.

    Vertex i moves to sum_j w_ij [X_j + d_ij u_ij] / sum_j w_ij, where X_j are
    the positions current at that point of the sweep and u_ij the unit
    directions of the reference layout Z. Every move lowers F^Z, so
    stress(result) <= F^Z(result) <= F^Z(Z) = stress(Z).
    """
    Z = state.z_ref.coords
    U = _directions(Z, rng)
    X = np.array(Z, copy=True)
    W = w.w
    D = d.d

    for i in range(X.shape[0]):
        wi = W[i].copy()
        wi[i] = 0.0
        total = wi.sum()
        if total <= 0:
            continue
        target = X + D[i][:, None] * U[i]
        X[i] = (wi[:, None] * target).sum(axis=0) / total

    return Layout(coords=X, ids=state.z_ref.ids)


def _initial_layout(
    d: TimeDistanceMatrix,
    dims: int,
    init: Union[Layout, InitMode, str],
    rng: np.random.Generator,
) -> Layout:
    if isinstance(init, Layout):
        if init.n != d.n or init.dims != dims:
            raise DimensionMismatch(f"initial layout is {init.n}x{init.dims}, expected {d.n}x{dims}")
        return init
    if InitMode(init) == InitMode.RANDOM:
        return Layout(coords=random_coords(d, dims, rng), ids=d.ids)

    seed_dims = min(dims, d.n)
    layout = classical_mds(d, seed_dims)
    if seed_dims == dims:
        return layout
    padded = np.zeros((d.n, dims))
    padded[:, :seed_dims] = layout.coords
    return Layout(coords=padded, ids=d.ids)


def run_majorization(
    d: TimeDistanceMatrix,
    w: WeightMatrix,
    dims: int,
    init: Union[Layout, InitMode, str] = InitMode.CLASSICAL,
    max_iter: int = 300,
    tol: float = 1e-7,
    seed: int = 0,
) -> Tuple[Layout, RunRecord]:
    """Iterate majorize_step until the relative stress improvement drops below tol"""
    rng = np.random.default_rng(seed)
    x = _initial_layout(d, dims, init, rng)
    norm = normalizer(d, w)

    prev = raw_stress(x.coords, d.d, w.w)
    raws, norms = [], []
    for it in range(1, max_iter + 1):
        state = majorization_state(x, d, w, strict=False)
        x = majorize_step(state, d, w, rng=rng)
        cur = raw_stress(x.coords, d.d, w.w)
        raws.append(cur)
        norms.append(cur / norm if norm > 0 else 0.0)
        logger.debug(f"[SMACOF] seed={seed} iter {it} stress={cur:.10g}")

        if settings.DEBUG:
            assert cur <= prev + 1e-12 * (1.0 + prev), f"stress increased at iteration {it}: {prev} -> {cur}"

        improvement = (prev - cur) / prev if prev > 0 else 0.0
        prev = cur
        if improvement < tol or cur <= EXACT_FIT * norm:
            break

    record = make_record(seed, "majorization", raws, norms)
    logger.info(f"[SMACOF] seed={seed} {record.iterations_used} iterations, normalized stress {record.final.normalized:.6g}")
    return x, record
