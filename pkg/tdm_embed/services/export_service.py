"""Reading and writing of network, matrix, graph, layout and trajectory files"""
import csv
import io
import json
import logging
import math
from pathlib import Path
from typing import Any, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ValidationError

from ..errors import MalformedFile
from ..models import Arc, KLayout, Layout, RoadGraph, RunRecord
from ..schemas import (
    ArcExport,
    GraphExport,
    IterationRow,
    KLayoutExport,
    LayoutExport,
    RoadNetwork,
    ValidationReport,
)
from ..utils.road_graph import parse_network

logger = logging.getLogger(__name__)

AnyLayout = Union[Layout, KLayout]


def dumps(payload: Union[BaseModel, dict, list]) -> str:
    """Canonical JSON: sorted keys, repr floats, trailing newline"""
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json", by_alias=True)
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


class ExportService:
    """File formats of the command-line tool"""

    @staticmethod
    def write_text(path: Path, text: str) -> None:
        path = Path(path)
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")

    @staticmethod
    def write_json(path: Path, payload: Union[BaseModel, dict, list]) -> None:
        ExportService.write_text(path, dumps(payload))
        logger.debug(f"[EXPORT] wrote {path}")

    @staticmethod
    def read_json(path: Path) -> Any:
        raw = Path(path).read_bytes()
        try:
            return json.loads(raw)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise MalformedFile(f"{path}: not valid JSON ({exc})") from exc

    # Network and graph
    @staticmethod
    def read_network(path: Path) -> RoadNetwork:
        return parse_network(Path(path).read_bytes())

    @staticmethod
    def graph_export(g: RoadGraph) -> GraphExport:
        return GraphExport(
            mode=g.mode,
            vertices=list(g.vertices),
            arcs=[ArcExport(from_=a.tail, to=a.head, travel_time_s=a.travel_time, segment=a.segment) for a in g.arcs],
            entries=sorted(g.entries),
            exits=sorted(g.exits),
        )

    @staticmethod
    def validation_report(g: RoadGraph) -> ValidationReport:
        return ValidationReport(ok=True, vertex_count=g.n, arc_count=len(g.arcs))

    @staticmethod
    def graph_from_payload(payload: dict) -> RoadGraph:
        try:
            exp = GraphExport.model_validate(
                {**payload, "arcs": [{**a, "from_": a.get("from")} for a in payload.get("arcs", [])]}
            )
        except (ValidationError, AttributeError, TypeError) as exc:
            raise MalformedFile(f"not a graph file: {exc}") from exc
        return RoadGraph(
            vertices=tuple(exp.vertices),
            arcs=tuple(Arc(a.from_, a.to, a.travel_time_s, a.segment) for a in exp.arcs),
            entries=frozenset(exp.entries),
            exits=frozenset(exp.exits),
            mode=exp.mode,
        )

    # Matrices
    @staticmethod
    def matrix_csv(m: np.ndarray, ids: Sequence[str]) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(ids)
        for row in np.asarray(m, dtype=float):
            writer.writerow(["inf" if math.isinf(v) else repr(float(v)) for v in row])
        return buf.getvalue()

    @staticmethod
    def read_matrix_csv(path: Path) -> Tuple[np.ndarray, List[str]]:
        """Header of vertex ids, then one row per vertex; `inf` marks unreachable"""
        text = Path(path).read_text(encoding="utf-8")
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        if not rows:
            raise MalformedFile(f"{path}: empty matrix file")
        ids = [c.strip() for c in rows[0]]
        body = rows[1:]
        if len(body) != len(ids) or any(len(r) != len(ids) for r in body):
            raise MalformedFile(f"{path}: expected a {len(ids)}x{len(ids)} matrix under the header")
        if len(set(ids)) != len(ids):
            raise MalformedFile(f"{path}: duplicate vertex ids in header")
        try:
            m = np.array([[float(c) for c in r] for r in body], dtype=float)
        except ValueError as exc:
            raise MalformedFile(f"{path}: {exc}") from exc
        if np.isnan(m).any():
            raise MalformedFile(f"{path}: NaN entries are not allowed")
        if (m < 0).any():
            i, j = (int(k) for k in np.argwhere(m < 0)[0])
            raise MalformedFile(f"{path}: negative travel time {m[i, j]:g} from {ids[i]!r} to {ids[j]!r}")
        if (np.diag(m) != 0).any():
            i = int(np.flatnonzero(np.diag(m) != 0)[0])
            raise MalformedFile(f"{path}: diagonal entry for {ids[i]!r} must be 0, got {m[i, i]:g}")
        return m, ids

    # Layouts
    @staticmethod
    def layout_export(x: AnyLayout) -> Union[LayoutExport, KLayoutExport]:
        coords = {vid: [float(v) for v in row] for vid, row in zip(x.ids, x.coords)}
        if isinstance(x, KLayout):
            return KLayoutExport(kappa=x.kappa.kappa, dims=x.dims, coords=coords)
        return LayoutExport(dims=x.dims, coords=coords)

    @staticmethod
    def write_layout(path: Path, x: AnyLayout) -> None:
        ExportService.write_json(path, ExportService.layout_export(x))

    @staticmethod
    def read_layout(path: Path, order: Optional[Sequence[str]] = None) -> AnyLayout:
        """Layout or KLayout file; rows follow `order` when given, file order otherwise"""
        payload = ExportService.read_json(path)
        try:
            if isinstance(payload, dict) and "kappa" in payload:
                exp: Union[LayoutExport, KLayoutExport] = KLayoutExport.model_validate(payload)
            else:
                exp = LayoutExport.model_validate(payload)
        except ValidationError as exc:
            raise MalformedFile(f"{path}: not a layout file ({exc.errors()[0]['msg']})") from exc

        ids = list(order) if order is not None and set(order) == set(exp.coords) else list(exp.coords)
        rows = [exp.coords[vid] for vid in ids]
        if any(len(r) != exp.dims for r in rows):
            raise MalformedFile(f"{path}: coordinate rows must have {exp.dims} entries")
        coords = np.array(rows, dtype=float).reshape(len(ids), exp.dims)
        if isinstance(exp, KLayoutExport):
            return KLayout(coords=coords, kappa=exp.kappa, ids=tuple(ids))
        return Layout(coords=coords, ids=tuple(ids))

    # Trajectories
    @staticmethod
    def trajectory_jsonl(record: RunRecord) -> str:
        lines = []
        for t, (raw, norm) in enumerate(zip(record.trajectory_raw, record.trajectory), start=1):
            row = IterationRow(iter=t, stress_raw=raw, stress_norm=norm)
            if record.kappa_trajectory:
                row.kappa = record.kappa_trajectory[t - 1]
            lines.append(json.dumps(row.model_dump(exclude_none=True), sort_keys=True))
        return "\n".join(lines) + "\n"

    @staticmethod
    def write_trajectory(path: Path, record: RunRecord) -> None:
        ExportService.write_text(path, ExportService.trajectory_jsonl(record))
