"""Road network ingestion: file -> RoadNetwork -> RoadGraph, and single-pair routing"""
import heapq
import itertools
import logging
from typing import Dict, List, Tuple, Union

from pydantic import ValidationError

from ..errors import DegreeViolation, InvalidSegment, MalformedFile, NoPath
from ..models import Arc, RoadGraph, RoadPath
from ..schemas import IngestMode, RoadNetwork, RoadSegment

logger = logging.getLogger(__name__)

# pydantic error types that mean "parsed fine, but a value breaks a rule"
_RULE_ERRORS = {"greater_than", "value_error", "finite_number"}


def parse_network(data: Union[bytes, str]) -> RoadNetwork:
    """Parse a UTF-8 JSON network file into a validated RoadNetwork"""
    try:
        net = RoadNetwork.model_validate_json(data)
    except ValidationError as exc:
        errors = exc.errors()
        first = errors[0]
        where = ".".join(str(p) for p in first.get("loc", ())) or "<root>"
        message = f"{where}: {first.get('msg', 'invalid')}"
        if all(e["type"] in _RULE_ERRORS for e in errors):
            raise InvalidSegment(message) from exc
        raise MalformedFile(message) from exc

    logger.debug(f"[GRAPH] parsed {len(net.segments)} segments, {len(net.entries)} entries, {len(net.exits)} exits")
    return net


def _endpoint_graph(net: RoadNetwork) -> Tuple[List[str], List[Arc], frozenset, frozenset]:
    vertices: Dict[str, None] = {}
    arcs: List[Arc] = []
    for seg in net.segments:
        vertices.setdefault(seg.from_, None)
        vertices.setdefault(seg.to, None)
        arcs.append(Arc(seg.from_, seg.to, seg.travel_time, seg.id))
        if seg.bidirectional:
            arcs.append(Arc(seg.to, seg.from_, seg.travel_time, seg.id))
    return list(vertices), arcs, net.entries, net.exits


def _exit_points(seg: RoadSegment) -> set:
    return {seg.to, seg.from_} if seg.bidirectional else {seg.to}


def _entry_points(seg: RoadSegment) -> set:
    return {seg.from_, seg.to} if seg.bidirectional else {seg.from_}


def _block_graph(net: RoadNetwork) -> Tuple[List[str], List[Arc], frozenset, frozenset]:
    """Each segment becomes a vertex; blocks sharing a traversable endpoint are joined.

    The arc time is the centre-to-centre time: half of each block's traversal time.
    """
    vertices = [seg.id for seg in net.segments]
    arcs: List[Arc] = []
    for s in net.segments:
        leaves = _exit_points(s)
        for t in net.segments:
            if s.id == t.id:
                continue
            shared = sorted(leaves & _entry_points(t))
            if shared:
                arcs.append(Arc(s.id, t.id, 0.5 * (s.travel_time + t.travel_time), shared[0]))

    entries = frozenset(seg.id for seg in net.segments if _entry_points(seg) & net.entries)
    exits = frozenset(seg.id for seg in net.segments if _exit_points(seg) & net.exits)
    return vertices, arcs, entries, exits


def build_graph(net: RoadNetwork, mode: IngestMode = IngestMode.ENDPOINT) -> RoadGraph:
    """Build the directed road graph with travel-time arcs and check entry/exit degrees"""
    mode = IngestMode(mode)
    if mode == IngestMode.BLOCK:
        vertices, arcs, entries, exits = _block_graph(net)
    else:
        vertices, arcs, entries, exits = _endpoint_graph(net)

    graph = RoadGraph(
        vertices=tuple(vertices),
        arcs=tuple(arcs),
        entries=frozenset(entries),
        exits=frozenset(exits),
        mode=mode,
    )

    for v in graph.vertices:
        if v in graph.entries and graph.out_degree(v) == 0:
            raise DegreeViolation(v, f"entry vertex {v!r} has no outgoing arc")
        if v in graph.exits and graph.in_degree(v) == 0:
            raise DegreeViolation(v, f"exit vertex {v!r} has no incoming arc")

    logger.info(f"[GRAPH] {mode.value} graph: {graph.n} vertices, {len(graph.arcs)} arcs")
    return graph


def path_between(g: RoadGraph, start: str, end: str) -> RoadPath:
    """Minimum travel-time directed path; ties go to the lexicographically smallest vertex sequence"""
    for v in (start, end):
        if v not in g.index:
            raise NoPath(f"unknown vertex {v!r}")

    counter = itertools.count()
    heap = [(0.0, (start,), (), next(counter), ())]
    settled = set()
    while heap:
        time, path, seg_ids, _, arcs = heapq.heappop(heap)
        v = path[-1]
        if v in settled:
            continue
        settled.add(v)
        if v == end:
            return RoadPath(vertices=path, arcs=arcs, total_time=time)
        for arc in g.out_arcs[v]:
            if arc.head in settled:
                continue
            heapq.heappush(
                heap,
                (time + arc.travel_time, path + (arc.head,), seg_ids + (arc.segment,), next(counter), arcs + (arc,)),
            )

    raise NoPath(f"{end!r} is not reachable from {start!r}")
