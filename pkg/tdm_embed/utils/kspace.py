"""Embeddings in κ-stereographic space and joint layout/curvature optimization.

One chart covers all three geometries: κ < 0 is the Poincaré ball of radius
1/sqrt(-κ), κ = 0 is flat space, κ > 0 is the stereographic sphere. The
distance d_κ(x, y) = (2/sqrt|κ|) tan_κ^-1 ||(-x) ⊕_κ y|| tends to 2||x - y||
as κ → 0, so the stress objective compares d_ij with δ_ij = d_κ/2.
"""
import logging
import math
from typing import Callable, NamedTuple, Optional, Tuple, Union

import numpy as np

from ..config import settings
from ..errors import DegenerateDenominator, DimensionMismatch, DomainViolation, InvalidSchedule, NonFiniteLayout
from ..models import KAPPA_BOUND, Curvature, KLayout, RunRecord, StressReport, TimeDistanceMatrix, WeightMatrix
from .runs import make_record, random_coords
from .sgd import run_sgd, schedule_for
from .stress import COINCIDENCE_EPS, normalizer, report

logger = logging.getLogger(__name__)

FLAT_EPS = 1e-12
DENOM_EPS = 1e-14
BOUNDARY_MARGIN = 1e-5
Q_FLOOR = 1e-30
ARTANH_CAP = 1.0 - 1e-15

KappaLike = Union[float, Curvature]


def _k(kappa: KappaLike) -> float:
    return float(kappa.kappa) if isinstance(kappa, Curvature) else float(kappa)


def _check_point(x: np.ndarray, kappa: float) -> None:
    if not np.all(np.isfinite(x)):
        raise NonFiniteLayout("point has non-finite coordinates")
    if kappa < 0 and float(x @ x) * -kappa >= 1.0:
        raise DomainViolation(f"point with norm {math.sqrt(float(x @ x)):.6g} lies outside the ball of radius {1 / math.sqrt(-kappa):.6g}")


def mobius_add(x: np.ndarray, y: np.ndarray, kappa: KappaLike) -> np.ndarray:
    """Gyrovector addition x ⊕_κ y"""
    k = _k(kappa)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise DimensionMismatch(f"points of shape {x.shape} and {y.shape}")
    _check_point(x, k)
    _check_point(y, k)

    xy = float(x @ y)
    x2 = float(x @ x)
    y2 = float(y @ y)
    num = (1.0 - 2.0 * k * xy - k * y2) * x + (1.0 + k * x2) * y
    den = 1.0 - 2.0 * k * xy + k * k * x2 * y2
    if abs(den) < DENOM_EPS:
        raise DegenerateDenominator(f"Möbius addition denominator {den:.3g} is numerically zero")
    return num / den


def _half_from_u(u: np.ndarray, kappa: float, clamp: bool) -> Tuple[np.ndarray, np.ndarray]:
    """δ = tan_κ^-1(u) and the u actually used (capped inside the ball when clamp is set)"""
    if abs(kappa) < FLAT_EPS:
        return u.copy(), u
    if kappa > 0:
        s = math.sqrt(kappa)
        return np.arctan(s * u) / s, u
    s = math.sqrt(-kappa)
    arg = s * u
    if np.any(arg >= 1.0):
        if not clamp:
            raise DomainViolation("hyperbolic distance argument reached 1; points are on or beyond the boundary")
        arg = np.minimum(arg, ARTANH_CAP)
    return np.arctanh(arg) / s, arg / s


def k_distance(x: np.ndarray, y: np.ndarray, kappa: KappaLike) -> float:
    """Geodesic distance in the κ-stereographic model"""
    k = _k(kappa)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if abs(k) < FLAT_EPS:
        _check_point(x, k)
        _check_point(y, k)
        return 2.0 * float(np.linalg.norm(x - y))
    u = float(np.linalg.norm(mobius_add(-x, y, k)))
    half, _ = _half_from_u(np.array([u]), k, clamp=False)
    return 2.0 * float(half[0])


class _Terms(NamedTuple):
    delta: np.ndarray
    diff: np.ndarray
    ell: np.ndarray
    q: np.ndarray
    u: np.ndarray
    sq: np.ndarray
    clamped: bool


def _terms(coords: np.ndarray, kappa: float, clamp: bool) -> _Terms:
    """Pairwise half-distances via ||(-x) ⊕ y|| = ||x - y|| / sqrt(Q)"""
    gram = coords @ coords.T
    sq = np.diag(gram).copy()
    q = 1.0 + 2.0 * kappa * gram + kappa * kappa * np.outer(sq, sq)

    clamped = False
    low = q < Q_FLOOR
    np.fill_diagonal(low, False)
    if low.any():
        if not clamp and kappa > 0:
            i, j = (int(v) for v in np.argwhere(low)[0])
            raise DegenerateDenominator(f"points {i} and {j} are antipodal")
        clamped = True
    q = np.maximum(q, Q_FLOOR)

    diff = coords[:, None, :] - coords[None, :, :]
    ell = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    u = ell / np.sqrt(q)
    delta, u_used = _half_from_u(u, kappa, clamp)
    return _Terms(delta, diff, ell, q, u_used, sq, clamped)


def pairwise_k_distances(coords: np.ndarray, kappa: KappaLike, clamp: bool = False) -> np.ndarray:
    return 2.0 * _terms(np.asarray(coords, dtype=float), _k(kappa), clamp).delta


def _raw_from_terms(t: _Terms, d: np.ndarray, w: np.ndarray) -> float:
    iu = np.triu_indices(d.shape[0], 1)
    gap = d[iu] - t.delta[iu]
    return float(np.sum(w[iu] * gap * gap))


def _gradient_from_terms(t: _Terms, coords: np.ndarray, kappa: float, d: np.ndarray, w: np.ndarray) -> np.ndarray:
    ddu = 1.0 / (1.0 + kappa * t.u * t.u)
    live = t.ell >= COINCIDENCE_EPS
    np.fill_diagonal(live, False)
    safe_ell = np.where(live, t.ell, 1.0)
    root_q = np.sqrt(t.q)

    coef_a = np.where(live, ddu / (safe_ell * root_q), 0.0)
    coef_b = np.where(live, ddu * t.ell / (2.0 * t.q * root_q), 0.0)

    m = -2.0 * w * (d - t.delta)
    np.fill_diagonal(m, 0.0)
    a = m * coef_a
    b = m * coef_b

    # dQ_ij/dX_i = 2κ X_j + 2κ² |X_j|² X_i
    term_q = 2.0 * kappa * (b @ coords) + 2.0 * kappa * kappa * (b @ t.sq)[:, None] * coords
    return np.einsum("ij,ijk->ik", a, t.diff) - term_q


def _check_dims(n: int, d: TimeDistanceMatrix, w: WeightMatrix) -> None:
    if d.n != n or w.n != n:
        raise DimensionMismatch(f"layout has {n} points, distances {d.n}, weights {w.n}")


def k_stress(x: KLayout, d: TimeDistanceMatrix, w: WeightMatrix) -> StressReport:
    _check_dims(x.n, d, w)
    t = _terms(x.coords, x.kappa.kappa, clamp=False)
    return report(_raw_from_terms(t, d.d, w.w), normalizer(d, w))


def k_stress_gradient(x: KLayout, d: TimeDistanceMatrix, w: WeightMatrix) -> np.ndarray:
    """Euclidean gradient of the raw κ-stress with respect to the coordinates"""
    _check_dims(x.n, d, w)
    k = x.kappa.kappa
    t = _terms(x.coords, k, clamp=False)
    return _gradient_from_terms(t, x.coords, k, d.d, w.w)


def _conformal_scale(coords: np.ndarray, kappa: float) -> np.ndarray:
    return (1.0 + kappa * np.einsum("ij,ij->i", coords, coords)) ** 2 / 4.0


def riemannian_gradient(x: KLayout, egrad: np.ndarray) -> np.ndarray:
    """Rescale a Euclidean gradient by the inverse metric (1 + κ|x|²)² / 4"""
    egrad = np.asarray(egrad, dtype=float)
    if egrad.shape != x.coords.shape:
        raise DimensionMismatch(f"gradient shape {egrad.shape} vs layout {x.coords.shape}")
    return _conformal_scale(x.coords, x.kappa.kappa)[:, None] * egrad


def _retract_coords(coords: np.ndarray, kappa: float) -> Tuple[np.ndarray, bool]:
    if not np.all(np.isfinite(coords)):
        raise NonFiniteLayout("optimizer produced non-finite coordinates")
    if kappa >= 0:
        return coords, False
    limit = (1.0 - BOUNDARY_MARGIN) / math.sqrt(-kappa)
    norms = np.linalg.norm(coords, axis=1)
    over = norms >= limit
    if not over.any():
        return coords, False
    out = coords.copy()
    out[over] *= (limit / norms[over])[:, None]
    return out, True


def retract(x: KLayout) -> KLayout:
    """Pull points back inside (1 - 1e-5) of the ball radius when κ < 0"""
    coords, _ = _retract_coords(np.array(x.coords, copy=True), x.kappa.kappa)
    return KLayout(coords=coords, kappa=x.kappa, ids=x.ids)


Observer = Callable[[int, KLayout], None]


def optimize_joint(
    d: TimeDistanceMatrix,
    w: WeightMatrix,
    dims: int,
    seed: int = 0,
    steps: int = 2000,
    lr_x: float = 0.05,
    lr_kappa: float = 0.01,
    observer: Optional[Observer] = None,
    every: int = 0,
    warmup: Optional[int] = None,
) -> Tuple[KLayout, RunRecord]:
    """Alternate Riemannian coordinate steps with finite-difference curvature steps.

    Work happens in units of the largest target distance c: distances d/c,
    coordinates x/c and curvature κc². d_κ is homogeneous under that change,
    so converting back is exact. Both steps descend the normalized stress.
    The random start first gets `warmup` flat SGD passes at κ = 0, which
    unfolds it before curvature moves; 0 starts the descent from the raw
    random layout.
    When observer is given it receives (step, layout) every `every` steps.
    """
    warmup = settings.KAPPA_WARMUP if warmup is None else warmup
    if steps < 1:
        raise InvalidSchedule(f"steps must be >= 1, got {steps}")
    if warmup < 0:
        raise InvalidSchedule(f"warmup must be >= 0, got {warmup}")
    if lr_x <= 0 or lr_kappa <= 0:
        raise InvalidSchedule(f"learning rates must be positive, got lr_x={lr_x}, lr_kappa={lr_kappa}")
    _check_dims(d.n, d, w)

    rng = np.random.default_rng(seed)
    c = float(d.d.max()) if d.n > 1 else 1.0
    c = c if c > 0 else 1.0
    dn = d.d / c
    ww = np.array(w.w)
    iu = np.triu_indices(d.n, 1)
    scale = float(np.sum(ww[iu] * dn[iu] ** 2)) or 1.0
    raw_scale = normalizer(d, w)
    bound = KAPPA_BOUND * c * c

    if warmup > 0:
        start, _ = run_sgd(d, w, dims, schedule_for(w, warmup), seed=seed)
        X = np.array(start.coords) / c
    else:
        X = random_coords(d, dims, rng) / c
    k = 0.0
    flags = set()

    def loss(coords: np.ndarray, kappa: float) -> float:
        t = _terms(coords, kappa, clamp=True)
        if t.clamped:
            flags.add("antipodal_clamped")
        return _raw_from_terms(t, dn, ww) / scale

    raws, norms, kappas = [], [], []
    for step in range(1, steps + 1):
        t = _terms(X, k, clamp=True)
        egrad = _gradient_from_terms(t, X, k, dn, ww) / scale
        X = X - lr_x * _conformal_scale(X, k)[:, None] * egrad
        X, moved = _retract_coords(X, k)

        h = 1e-6 * max(1.0, abs(k))
        gk = (loss(X, k + h) - loss(X, k - h)) / (2.0 * h)
        k = min(max(k - lr_kappa * gk, -bound), bound)
        X, moved_again = _retract_coords(X, k)
        if moved or moved_again:
            flags.add("boundary_retracted")

        cur = loss(X, k)
        norms.append(cur)
        raws.append(cur * raw_scale)
        kappas.append(k / (c * c))

        if settings.DEBUG and k < 0:
            assert float(np.max(np.einsum("ij,ij->i", X, X))) * -k < 1.0, f"left the ball at step {step}"
        if step % 200 == 0:
            logger.debug(f"[KAPPA] seed={seed} step {step} kappa={k / (c * c):.6g} stress={cur:.6g}")
        if observer is not None and every > 0 and (step % every == 0 or step == steps):
            observer(step, KLayout(coords=X * c, kappa=k / (c * c), ids=d.ids))

    layout = KLayout(coords=X * c, kappa=k / (c * c), ids=d.ids)
    record = make_record(seed, "kappa-joint", raws, norms, kappas, flags)
    logger.info(f"[KAPPA] seed={seed} kappa={layout.kappa.kappa:.6g} normalized stress {record.final.normalized:.6g}")
    if flags:
        logger.warning(f"[KAPPA] seed={seed} flags: {sorted(flags)}")
    return layout, record
