"""Deterministic SVG output: layout drawings and stress-trajectory plots"""
import logging
import math
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union
from xml.sax.saxutils import escape

import numpy as np

from ..errors import IdMismatch
from ..models import KLayout, Layout, RoadGraph, RunRecord
from .export_service import ExportService

logger = logging.getLogger(__name__)

SVG_NS = "http://www.w3.org/2000/svg"
CANVAS = 600
MARGIN = 0.05
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _num(x: float, prec: int = 6) -> str:
    v = round(float(x), prec)
    if v == int(v):
        return str(int(v))
    return repr(v)


def _props(attr: Dict[str, object]) -> str:
    return " ".join(f'{k.rstrip("_").replace("_", "-")}="{_num(v) if isinstance(v, float) else v}"' for k, v in attr.items())


def _element(tag: str, text: str = "", **attr) -> str:
    if text:
        return f"<{tag} {_props(attr)}>{escape(text)}</{tag}>"
    return f"<{tag} {_props(attr)}/>"


def _document(view: Tuple[float, float, float, float], body: List[str]) -> str:
    x0, y0, w, h = view
    head = f'<svg xmlns="{SVG_NS}" width="{CANVAS}" height="{CANVAS}" viewBox="{_num(x0)} {_num(y0)} {_num(w)} {_num(h)}">'
    return "\n".join([head, *("  " + line for line in body), "</svg>"]) + "\n"


def _plane(coords: np.ndarray) -> np.ndarray:
    """First two coordinates; 1-D layouts sit on the x axis"""
    if coords.shape[1] == 1:
        return np.column_stack([coords[:, 0], np.zeros(coords.shape[0])])
    return coords[:, :2]


class RenderService:
    """Draws layouts and trajectories as SVG"""

    @staticmethod
    def layout_svg(x: Union[Layout, KLayout], graph: RoadGraph) -> str:
        if set(x.ids) != set(graph.vertices) or len(x.ids) != graph.n:
            missing = sorted(set(graph.vertices) - set(x.ids))
            extra = sorted(set(x.ids) - set(graph.vertices))
            raise IdMismatch(f"layout and graph vertices differ; missing {missing}, unexpected {extra}")
        if x.dims > 2:
            logger.warning(f"[RENDER] layout has {x.dims} dimensions; drawing the first two")

        row = {vid: i for i, vid in enumerate(x.ids)}
        pts = _plane(x.coords)
        pts = pts * np.array([1.0, -1.0])

        radius = None
        if isinstance(x, KLayout) and x.kappa.kappa < 0:
            radius = 1.0 / math.sqrt(-x.kappa.kappa)

        lo = pts.min(axis=0) if len(pts) else np.zeros(2)
        hi = pts.max(axis=0) if len(pts) else np.zeros(2)
        if radius is not None:
            lo = np.minimum(lo, -radius)
            hi = np.maximum(hi, radius)
        span = float(max(hi[0] - lo[0], hi[1] - lo[1])) or 1.0
        centre = (lo + hi) / 2.0
        half = span * (0.5 + MARGIN)
        view = (centre[0] - half, centre[1] - half, 2 * half, 2 * half)

        node_r = span * 0.012
        stroke = span * 0.003
        body: List[str] = []
        if radius is not None:
            body.append(_element("circle", class_="domain", cx=0.0, cy=0.0, r=radius, fill="none", stroke="#999999", stroke_width=stroke))
        for i, j in graph.undirected_edges():
            a = pts[row[graph.vertices[i]]]
            b = pts[row[graph.vertices[j]]]
            body.append(_element("line", x1=a[0], y1=a[1], x2=b[0], y2=b[1], stroke="#555555", stroke_width=stroke))
        for vid in graph.vertices:
            p = pts[row[vid]]
            body.append(_element("circle", class_="node", cx=p[0], cy=p[1], r=node_r, fill="#1f77b4"))
            body.append(_element("text", vid, x=p[0] + node_r * 1.5, y=p[1] - node_r * 1.5, font_size=span * 0.03, font_family="sans-serif"))

        logger.info(f"[RENDER] {graph.n} vertices, {len(graph.undirected_edges())} edges")
        return _document(view, body)

    @staticmethod
    def render_svg(x: Union[Layout, KLayout], graph: RoadGraph, out: Path) -> None:
        ExportService.write_text(out, RenderService.layout_svg(x, graph))

    @staticmethod
    def mean_trajectory(records: Sequence[RunRecord]) -> List[float]:
        """Per-iteration mean normalized stress; finished runs hold their final value"""
        length = max(len(r.trajectory) for r in records)
        rows = [list(r.trajectory) + [r.trajectory[-1]] * (length - len(r.trajectory)) for r in records]
        return np.mean(np.array(rows), axis=0).tolist()

    @staticmethod
    def trajectory_svg(series: Dict[str, List[float]]) -> str:
        """log10 stress against iteration, one polyline per named series"""
        floor = 1e-12
        longest = max((len(v) for v in series.values()), default=1)
        logs = {name: [math.log10(max(v, floor)) for v in values] for name, values in series.items()}
        flat = [v for values in logs.values() for v in values] or [0.0]
        lo, hi = min(flat), max(flat)
        if hi - lo < 1e-9:
            lo, hi = lo - 1.0, hi + 1.0

        size = float(CANVAS)
        pad = size * 0.1

        def to_xy(t: int, v: float) -> Tuple[float, float]:
            x = pad + (size - 2 * pad) * (t / max(longest - 1, 1))
            y = size - pad - (size - 2 * pad) * ((v - lo) / (hi - lo))
            return x, y

        body = [
            _element("line", x1=pad, y1=size - pad, x2=size - pad, y2=size - pad, stroke="#000000"),
            _element("line", x1=pad, y1=pad, x2=pad, y2=size - pad, stroke="#000000"),
            _element("text", "iteration", x=size / 2, y=size - pad / 3, font_size=14.0, font_family="sans-serif"),
            _element("text", f"log10 stress [{_num(lo, 3)}, {_num(hi, 3)}]", x=pad / 4, y=pad / 2, font_size=14.0, font_family="sans-serif"),
        ]
        for k, name in enumerate(sorted(logs)):
            color = PALETTE[k % len(PALETTE)]
            points = " ".join(f"{_num(x)},{_num(y)}" for x, y in (to_xy(t, v) for t, v in enumerate(logs[name])))
            body.append(_element("polyline", points=points, fill="none", stroke=color, stroke_width=2.0))
            body.append(_element("text", name, x=size - 2.5 * pad, y=pad + 18.0 * k, fill=color, font_size=14.0, font_family="sans-serif"))
        return _document((0.0, 0.0, size, size), body)
