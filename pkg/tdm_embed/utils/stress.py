"""Stress objective, its gradient, rigid alignment and the direct-encoding lookup"""
from typing import Tuple

import numpy as np

from ..errors import CoincidentPoints, DimensionMismatch, IndexOutOfRange
from ..models import EmbeddingTable, Layout, StressReport, TimeDistanceMatrix, WeightMatrix

COINCIDENCE_EPS = 1e-12


def pairwise_distances(coords: np.ndarray) -> np.ndarray:
    diff = coords[:, None, :] - coords[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def _check_dims(n: int, d: TimeDistanceMatrix, w: WeightMatrix) -> None:
    if d.n != n or w.n != n:
        raise DimensionMismatch(f"layout has {n} points, distances {d.n}, weights {w.n}")


def normalizer(d: TimeDistanceMatrix, w: WeightMatrix) -> float:
    """Sum over i<j of w_ij d_ij^2"""
    iu = np.triu_indices(d.n, 1)
    return float(np.sum(w.w[iu] * d.d[iu] ** 2))


def report(raw: float, norm: float) -> StressReport:
    return StressReport(raw=raw, normalized=raw / norm if norm > 0 else 0.0)


def raw_stress(coords: np.ndarray, d: np.ndarray, w: np.ndarray) -> float:
    iu = np.triu_indices(coords.shape[0], 1)
    gap = d[iu] - pairwise_distances(coords)[iu]
    return float(np.sum(w[iu] * gap * gap))


def stress(x: Layout, d: TimeDistanceMatrix, w: WeightMatrix) -> StressReport:
    """Weighted stress summed once per unordered pair (i < j)"""
    _check_dims(x.n, d, w)
    return report(raw_stress(x.coords, d.d, w.w), normalizer(d, w))


def stress_gradient(x: Layout, d: TimeDistanceMatrix, w: WeightMatrix) -> np.ndarray:
    """Analytic gradient of the raw stress with respect to every coordinate"""
    _check_dims(x.n, d, w)
    coords = x.coords
    diff = coords[:, None, :] - coords[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    off = ~np.eye(x.n, dtype=bool)

    close = off & (dist < COINCIDENCE_EPS)
    if close.any():
        i, j = (int(k) for k in np.argwhere(close)[0])
        raise CoincidentPoints(i, j)

    coef = np.zeros_like(dist)
    coef[off] = 2.0 * w.w[off] * (dist[off] - d.d[off]) / dist[off]
    return np.einsum("ij,ijk->ik", coef, diff)


def procrustes_align(a: Layout, b: Layout) -> Tuple[Layout, float]:
    """Superimpose b onto a by translation plus an orthogonal map (reflections allowed).

    Returns the moved copy of b and the root-mean-square deviation left over.
    """
    if a.coords.shape != b.coords.shape:
        raise DimensionMismatch(f"cannot align shapes {a.coords.shape} and {b.coords.shape}")
    n = a.n
    if n == 0:
        return b, 0.0

    mu_a = a.coords.mean(axis=0)
    mu_b = b.coords.mean(axis=0)
    a0 = a.coords - mu_a
    b0 = b.coords - mu_b

    u, _, vt = np.linalg.svd(b0.T @ a0)
    rotation = u @ vt
    moved = b0 @ rotation + mu_a

    residual = float(np.sqrt(np.sum((a.coords - moved) ** 2) / n))
    return Layout(coords=moved, ids=b.ids), residual


def encode_lookup(t: EmbeddingTable, i: int) -> np.ndarray:
    """Embedding of vertex i: Z times the one-hot indicator of i"""
    if not 0 <= i < t.cols:
        raise IndexOutOfRange(f"vertex index {i} outside [0, {t.cols})")
    return t.z_enc[:, i].copy()
