"""Time-distance matrices: all-pairs travel times, symmetrization and stress weights"""
import logging
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from ..errors import DimensionMismatch, DisconnectedPair, ZeroDistance
from ..models import RoadGraph, TimeDistanceMatrix, WeightMatrix
from ..schemas import SymPolicy

logger = logging.getLogger(__name__)


def arc_matrix(g: RoadGraph) -> csr_matrix:
    """Sparse arc-time matrix; parallel arcs keep the fastest one"""
    fastest: Dict[Tuple[int, int], float] = {}
    for arc in g.arcs:
        key = (g.index[arc.tail], g.index[arc.head])
        if key not in fastest or arc.travel_time < fastest[key]:
            fastest[key] = arc.travel_time

    n = g.n
    if not fastest:
        return csr_matrix((n, n), dtype=float)
    rows, cols = zip(*fastest)
    return csr_matrix((list(fastest.values()), (list(rows), list(cols))), shape=(n, n), dtype=float)


def all_pairs_times(g: RoadGraph) -> np.ndarray:
    """Directed N x N minimum travel times; +inf marks unreachable pairs"""
    if g.n == 0:
        return np.zeros((0, 0))
    # one label-setting (Dijkstra) pass per source, vertex order as given
    times = dijkstra(arc_matrix(g), directed=True)
    times = np.asarray(times, dtype=float)
    np.fill_diagonal(times, 0.0)

    unreachable = int(np.isinf(times).sum())
    logger.info(f"[METRIC] all-pairs times over {g.n} vertices, {unreachable} unreachable ordered pairs")
    return times


def reachability_components(m: np.ndarray, ids: Sequence[str]) -> List[List[str]]:
    """Groups of vertices connected when arc direction is ignored"""
    linked = np.isfinite(m) | np.isfinite(m.T)
    count, labels = connected_components(csr_matrix(linked.astype(float)), directed=False)
    groups: List[List[str]] = [[] for _ in range(count)]
    for i, label in enumerate(labels):
        groups[label].append(ids[i])
    return groups


def symmetrize(m: np.ndarray, policy: SymPolicy = SymPolicy.MEAN, ids: Sequence[str] = ()) -> TimeDistanceMatrix:
    """Combine m_ij and m_ji into one symmetric travel time per pair"""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    n = m.shape[0]
    ids = tuple(ids) if ids else tuple(str(i) for i in range(n))
    if np.any(np.diag(m) != 0) or np.any(m < 0):
        raise DimensionMismatch("matrix must have a zero diagonal and nonnegative entries")

    a, b = m, m.T
    fa, fb = np.isfinite(a), np.isfinite(b)

    missing = ~fa & ~fb
    if missing.any():
        i, j = (int(k) for k in np.argwhere(missing)[0])
        components = reachability_components(m, ids)
        raise DisconnectedPair(
            i, j,
            f"no route between {ids[i]!r} and {ids[j]!r} in either direction; "
            f"components: {components}",
            components=components,
        )

    both = fa & fb
    if policy == SymPolicy.MIN:
        combined = np.minimum(a, b)
    elif policy == SymPolicy.MAX:
        combined = np.maximum(np.where(fa, a, -np.inf), np.where(fb, b, -np.inf))
    else:
        combined = 0.5 * (np.where(fa, a, 0.0) + np.where(fb, b, 0.0))

    d = np.where(both, combined, np.where(fa, a, b))
    # exact symmetry regardless of summation order
    d = np.triu(d, 1)
    d = d + d.T
    return TimeDistanceMatrix(d=d, ids=ids)


def weights(d: TimeDistanceMatrix, alpha: int = 2) -> WeightMatrix:
    """Stress weights w_ij = d_ij^-alpha, zero on the diagonal"""
    n = d.n
    off = ~np.eye(n, dtype=bool)
    if alpha == 0:
        return WeightMatrix(w=off.astype(float), alpha=alpha)

    zero = off & (d.d == 0)
    if zero.any():
        i, j = (int(k) for k in np.argwhere(zero)[0])
        raise ZeroDistance(i, j)

    w = np.zeros((n, n))
    w[off] = d.d[off] ** (-float(alpha))
    return WeightMatrix(w=w, alpha=alpha)


def pair_count(n: int) -> int:
    """Number of proximities an N-vertex MDS problem needs"""
    return n * (n - 1) // 2
