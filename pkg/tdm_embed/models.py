"""In-memory domain types shared by the numeric kernels.

All types are immutable after construction: numpy buffers are copied and
flagged read-only, so instances can be handed to worker processes or
threads without defensive copies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from .errors import DimensionMismatch, DomainViolation, InvalidSchedule, NonFiniteLayout
from .schemas import IngestMode


def _frozen(a, ndim: int, name: str) -> np.ndarray:
    arr = np.array(a, dtype=float, copy=True)
    if arr.ndim != ndim:
        raise DimensionMismatch(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.flags.writeable = False
    return arr


def _square(a, name: str) -> np.ndarray:
    arr = _frozen(a, 2, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {arr.shape}")
    return arr


# Road graph
@dataclass(frozen=True)
class Arc:
    tail: str
    head: str
    travel_time: float
    segment: str


@dataclass(frozen=True)
class RoadGraph:
    vertices: Tuple[str, ...]
    arcs: Tuple[Arc, ...]
    entries: frozenset
    exits: frozenset
    mode: IngestMode = IngestMode.ENDPOINT
    index: Dict[str, int] = field(init=False, repr=False, compare=False)
    out_arcs: Dict[str, Tuple[Arc, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {v: i for i, v in enumerate(self.vertices)})
        adjacency: Dict[str, list] = {v: [] for v in self.vertices}
        for arc in self.arcs:
            adjacency[arc.tail].append(arc)
        object.__setattr__(self, "out_arcs", {v: tuple(a) for v, a in adjacency.items()})

    @property
    def n(self) -> int:
        return len(self.vertices)

    def in_degree(self, v: str) -> int:
        return sum(1 for arc in self.arcs if arc.head == v)

    def out_degree(self, v: str) -> int:
        return len(self.out_arcs[v])

    def undirected_edges(self) -> Tuple[Tuple[int, int], ...]:
        """Index pairs (i < j) joined by at least one arc, in first-seen order"""
        seen = {}
        for arc in self.arcs:
            i, j = self.index[arc.tail], self.index[arc.head]
            key = (min(i, j), max(i, j))
            seen.setdefault(key, None)
        return tuple(seen)


@dataclass(frozen=True)
class RoadPath:
    vertices: Tuple[str, ...]
    arcs: Tuple[Arc, ...]
    total_time: float


# Metric
@dataclass(frozen=True, eq=False)
class TimeDistanceMatrix:
    d: np.ndarray
    ids: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "d", _square(self.d, "distance matrix"))
        if not self.ids:
            object.__setattr__(self, "ids", tuple(str(i) for i in range(self.d.shape[0])))
        if len(self.ids) != self.d.shape[0]:
            raise DimensionMismatch(f"{len(self.ids)} ids for a {self.d.shape[0]}x{self.d.shape[0]} matrix")

    @property
    def n(self) -> int:
        return self.d.shape[0]


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    w: np.ndarray
    alpha: int = 2

    def __post_init__(self):
        object.__setattr__(self, "w", _square(self.w, "weight matrix"))

    @property
    def n(self) -> int:
        return self.w.shape[0]


# Layouts
@dataclass(frozen=True, eq=False)
class Layout:
    coords: np.ndarray
    ids: Tuple[str, ...] = ()

    def __post_init__(self):
        coords = _frozen(self.coords, 2, "layout")
        if coords.shape[1] < 1:
            raise DimensionMismatch("layout needs at least one dimension")
        if not np.all(np.isfinite(coords)):
            raise NonFiniteLayout("layout has non-finite coordinates")
        object.__setattr__(self, "coords", coords)
        if not self.ids:
            object.__setattr__(self, "ids", tuple(str(i) for i in range(coords.shape[0])))
        if len(self.ids) != coords.shape[0]:
            raise DimensionMismatch(f"{len(self.ids)} ids for {coords.shape[0]} points")

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dims(self) -> int:
        return self.coords.shape[1]


@dataclass(frozen=True)
class StressReport:
    raw: float
    normalized: float


@dataclass(frozen=True, eq=False)
class EmbeddingTable:
    """Direct-encoding matrix: column i is the embedding of vertex i"""

    z_enc: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "z_enc", _frozen(self.z_enc, 2, "embedding table"))

    @property
    def d(self) -> int:
        return self.z_enc.shape[0]

    @property
    def cols(self) -> int:
        return self.z_enc.shape[1]


# Iterative optimizers
@dataclass(frozen=True, eq=False)
class MajorizationState:
    z_ref: Layout
    lw: np.ndarray
    lz: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lw", _square(self.lw, "L^w"))
        object.__setattr__(self, "lz", _square(self.lz, "L^Z"))


@dataclass(frozen=True)
class SgdSchedule:
    eta_max: float
    eta_min: float
    iterations: int = 15

    def __post_init__(self):
        if self.iterations < 1:
            raise InvalidSchedule(f"iterations must be >= 1, got {self.iterations}")
        if not (self.eta_max >= self.eta_min > 0) or not math.isfinite(self.eta_max):
            raise InvalidSchedule(f"need eta_max >= eta_min > 0, got {self.eta_max}, {self.eta_min}")

    @property
    def decay(self) -> float:
        if self.iterations == 1:
            return 0.0
        return math.log(self.eta_max / self.eta_min) / (self.iterations - 1)

    def eta(self, t: int) -> float:
        return self.eta_max * math.exp(-self.decay * t)


@dataclass(frozen=True)
class RunRecord:
    seed: int
    trajectory: Tuple[float, ...]
    trajectory_raw: Tuple[float, ...]
    final: StressReport
    iterations_used: int
    optimizer: str = ""
    kappa_trajectory: Tuple[float, ...] = ()
    flags: Tuple[str, ...] = ()

    def __post_init__(self):
        if not self.trajectory:
            raise ValueError("trajectory must be nonempty")
        if len(self.trajectory) != len(self.trajectory_raw):
            raise DimensionMismatch("normalized and raw trajectories differ in length")


@dataclass(frozen=True)
class RunStatistics:
    mean: float
    min: float
    max: float
    coefficient_of_variation: float
    count: int


# Constant-curvature space
KAPPA_BOUND = 10.0


@dataclass(frozen=True)
class Curvature:
    kappa: float

    def __post_init__(self):
        kappa = float(self.kappa)
        if not math.isfinite(kappa):
            raise DomainViolation(f"curvature must be finite, got {kappa}")
        object.__setattr__(self, "kappa", min(max(kappa, -KAPPA_BOUND), KAPPA_BOUND))


@dataclass(frozen=True, eq=False)
class KLayout:
    coords: np.ndarray
    kappa: Curvature
    ids: Tuple[str, ...] = ()

    def __post_init__(self):
        if not isinstance(self.kappa, Curvature):
            object.__setattr__(self, "kappa", Curvature(self.kappa))
        coords = _frozen(self.coords, 2, "k-layout")
        if not np.all(np.isfinite(coords)):
            raise NonFiniteLayout("k-layout has non-finite coordinates")
        k = self.kappa.kappa
        if k < 0:
            radius = 1.0 / math.sqrt(-k)
            norms = np.linalg.norm(coords, axis=1)
            if norms.size and norms.max() >= radius:
                i = int(np.argmax(norms))
                raise DomainViolation(f"point {i} has norm {norms[i]:.6g} >= ball radius {radius:.6g}")
        object.__setattr__(self, "coords", coords)
        if not self.ids:
            object.__setattr__(self, "ids", tuple(str(i) for i in range(coords.shape[0])))
        if len(self.ids) != coords.shape[0]:
            raise DimensionMismatch(f"{len(self.ids)} ids for {coords.shape[0]} points")

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dims(self) -> int:
        return self.coords.shape[1]
