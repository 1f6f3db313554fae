"""Classical (Torgerson) MDS on a time-distance matrix"""
import logging
from typing import Tuple

import numpy as np

from ..errors import DimensionMismatch
from ..models import Layout, TimeDistanceMatrix

logger = logging.getLogger(__name__)

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
THETA_LARGE = 1e8
NEGLIGIBLE = 1e-18


def jacobi_eigh(a: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> Tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Sweeps over all (p, q) pairs in row order, annihilating a_pq with one plane
    rotation each, until the off-diagonal Frobenius norm is <= tol * ||a||.
    Returns (eigenvalues, eigenvectors as columns), unsorted.
    """
    A = np.array(a, dtype=float, copy=True)
    n = A.shape[0]
    V = np.eye(n)
    scale = np.linalg.norm(A)
    if n < 2 or scale == 0.0:
        return np.diag(A).copy(), V

    for sweep in range(max_sweeps):
        off = np.sqrt(max(np.sum(A * A) - np.sum(np.diag(A) ** 2), 0.0))
        if off <= tol * scale:
            logger.debug(f"[CMDS] jacobi converged after {sweep} sweeps")
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= NEGLIGIBLE * scale:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > THETA_LARGE:
                    # t -> 1/(2 theta); theta^2 overflows for tiny a_pq
                    t = 1.0 / (2.0 * theta)
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c

                col_p = A[:, p].copy()
                col_q = A[:, q].copy()
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                row_p = A[p, :].copy()
                row_q = A[q, :].copy()
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                A[p, q] = A[q, p] = 0.0

                vec_p = V[:, p].copy()
                vec_q = V[:, q].copy()
                V[:, p] = c * vec_p - s * vec_q
                V[:, q] = s * vec_p + c * vec_q
    else:
        logger.warning(f"[CMDS] jacobi stopped at {max_sweeps} sweeps before reaching tolerance")

    return np.diag(A).copy(), V


def double_center(d: TimeDistanceMatrix) -> np.ndarray:
    """B = -1/2 J D^2 J: the Gram matrix implied by the distances"""
    sq = d.d ** 2
    rows = sq.mean(axis=1)
    cols = sq.mean(axis=0)
    grand = sq.mean() if sq.size else 0.0
    b = -0.5 * (sq - rows[:, None] - cols[None, :] + grand)
    return 0.5 * (b + b.T)


def _orient(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its first non-negligible entry is positive"""
    out = vectors.copy()
    for k in range(out.shape[1]):
        nz = np.flatnonzero(np.abs(out[:, k]) > 1e-12)
        if nz.size and out[nz[0], k] < 0:
            out[:, k] = -out[:, k]
    return out


def classical_spectrum(d: TimeDistanceMatrix) -> Tuple[np.ndarray, np.ndarray, float]:
    """Eigenpairs of B sorted by descending eigenvalue, plus the negative-mass share.

    The share (sum of |negative eigenvalues| over sum of |eigenvalues|) is zero
    for Euclidean distance matrices and grows with non-Euclideanity.
    """
    b = double_center(d)
    values, vectors = jacobi_eigh(b)
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = _orient(vectors[:, order])

    total = np.sum(np.abs(values))
    negative = np.sum(np.abs(values[values < 0]))
    share = float(negative / total) if total > 0 else 0.0
    return values, vectors, share


def classical_mds(d: TimeDistanceMatrix, dims: int) -> Layout:
    """Top-D spectral layout; negative eigenvalues are clamped to zero columns"""
    n = d.n
    if n < 1 or not 1 <= dims <= max(n, 1):
        raise DimensionMismatch(f"classical MDS needs 1 <= dims <= n, got dims={dims}, n={n}")

    values, vectors, share = classical_spectrum(d)
    top = np.clip(values[:dims], 0.0, None)
    coords = vectors[:, :dims] * np.sqrt(top)[None, :]

    logger.info(f"[CMDS] n={n} dims={dims} top eigenvalues={np.round(values[:dims], 6).tolist()}")
    if share > 0:
        logger.info(f"[CMDS] negative eigenvalue mass share {share:.4g} (non-Euclidean input)")
    return Layout(coords=coords, ids=d.ids)
