"""Pydantic schemas for input files, run configuration and written artifacts"""
from enum import Enum
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


# Enums
class Optimizer(str, Enum):
    CLASSICAL = "classical"
    MAJORIZATION = "majorization"
    SGD = "sgd"
    KAPPA_JOINT = "kappa-joint"


class Space(str, Enum):
    EUCLIDEAN = "euclidean"
    KAPPA = "kappa"


class SymPolicy(str, Enum):
    MEAN = "mean"
    MIN = "min"
    MAX = "max"


class IngestMode(str, Enum):
    ENDPOINT = "endpoint"
    BLOCK = "block"


class InitMode(str, Enum):
    CLASSICAL = "classical"
    RANDOM = "random"


class GraphFamily(str, Enum):
    GRID = "grid"
    TREE = "tree"
    CYCLE = "cycle"
    COMPLETE = "complete"


# Network file
class RoadSegment(BaseModel):
    """One road block between two boundary vertices"""

    model_config = ConfigDict(frozen=True, populate_by_name=True, allow_inf_nan=False)

    id: str
    from_: str = Field(alias="from")
    to: str
    length_m: float = Field(gt=0)
    speed_limit_mps: float = Field(gt=0)
    bidirectional: bool = False

    @model_validator(mode="after")
    def _no_self_loop(self) -> "RoadSegment":
        if self.from_ == self.to:
            raise ValueError(f"segment {self.id!r} is a self-loop on {self.to!r}")
        return self

    @property
    def travel_time(self) -> float:
        return self.length_m / self.speed_limit_mps


class RoadNetwork(BaseModel):
    model_config = ConfigDict(frozen=True)

    segments: tuple[RoadSegment, ...] = ()
    entries: frozenset[str] = frozenset()
    exits: frozenset[str] = frozenset()

    @model_validator(mode="after")
    def _check_ids(self) -> "RoadNetwork":
        seen = set()
        for seg in self.segments:
            if seg.id in seen:
                raise ValueError(f"duplicate segment id {seg.id!r}")
            seen.add(seg.id)

        endpoints = {seg.from_ for seg in self.segments} | {seg.to for seg in self.segments}
        for kind, ids in (("entry", self.entries), ("exit", self.exits)):
            for vid in sorted(ids):
                if vid not in endpoints:
                    raise ValueError(f"{kind} {vid!r} is not an endpoint of any segment")
        return self


# Run configuration
class RunConfig(BaseModel):
    """Parameters of one command; defaults come from settings, then file, then flags"""

    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    optimizer: Optimizer = Optimizer.MAJORIZATION
    space: Space = Space.EUCLIDEAN
    alpha: Literal[0, 1, 2] = 2
    dims: int = Field(default=2, ge=1)
    seed: int = Field(default=0, ge=0)
    seeds: int = Field(default=25, ge=1)
    iters: int = Field(default=15, ge=1)
    converge_iters: int = Field(default=30, ge=1)
    max_iter: int = Field(default=300, ge=1)
    tol: float = Field(default=1e-7, gt=0)
    init: InitMode = InitMode.CLASSICAL
    sym: SymPolicy = SymPolicy.MEAN
    ingest: IngestMode = IngestMode.ENDPOINT
    kappa_steps: int = Field(default=2000, ge=1)
    kappa_warmup: int = Field(default=15, ge=0)
    lr_x: float = Field(default=0.05, gt=0)
    lr_kappa: float = Field(default=0.01, gt=0)
    snapshots: int = Field(default=0, ge=0)
    jobs: int = Field(default=0, ge=0)
    family: Optional[GraphFamily] = None
    size: int = Field(default=6, ge=1)

    @model_validator(mode="after")
    def _space_matches_optimizer(self) -> "RunConfig":
        if self.optimizer == Optimizer.KAPPA_JOINT:
            self.space = Space.KAPPA
        elif self.space == Space.KAPPA:
            raise ValueError("space 'kappa' requires optimizer 'kappa-joint'")
        return self


# Artifacts
class ArcExport(BaseModel):
    from_: str = Field(serialization_alias="from")
    to: str
    travel_time_s: float
    segment: str


class GraphExport(BaseModel):
    mode: IngestMode
    vertices: List[str]
    arcs: List[ArcExport]
    entries: List[str]
    exits: List[str]


class ValidationReport(BaseModel):
    ok: bool
    vertex_count: int
    arc_count: int


class LayoutExport(BaseModel):
    dims: int
    coords: Dict[str, List[float]]


class KLayoutExport(BaseModel):
    kappa: float
    dims: int
    coords: Dict[str, List[float]]


class IterationRow(BaseModel):
    iter: int
    stress_raw: float
    stress_norm: float
    kappa: Optional[float] = None


class RunSummary(BaseModel):
    seed: int
    final_raw: float
    final_norm: float
    iterations_used: int
    kappa_final: Optional[float] = None
    flags: List[str] = []


class StatsExport(BaseModel):
    mean: float
    min: float
    max: float
    cv: float
    mean_relative_to_best: float


class OptimizerBench(BaseModel):
    budget: StatsExport
    converged: StatsExport
    median_iterations_to_threshold: float
    iterations_to_threshold: List[int]
    runs: List[RunSummary]
    converged_runs: List[RunSummary]


class BenchReport(BaseModel):
    family: GraphFamily
    size: int
    vertex_count: int
    alpha: int
    dims: int
    seeds: List[int]
    budget_iterations: int
    threshold_factor: float
    optimizers: Dict[str, OptimizerBench]
