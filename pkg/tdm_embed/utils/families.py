"""Synthetic road networks with unit travel time per edge"""
import logging

import networkx as nx

from ..errors import InvalidConfig
from ..schemas import GraphFamily, RoadNetwork, RoadSegment

logger = logging.getLogger(__name__)


def family_graph(family: GraphFamily, size: int) -> nx.Graph:
    """grid: size x size lattice; tree: balanced binary tree of depth `size`; cycle / complete: `size` vertices"""
    family = GraphFamily(family)
    if family == GraphFamily.GRID:
        if size < 1:
            raise InvalidConfig(f"grid size must be >= 1, got {size}")
        g = nx.grid_2d_graph(size, size)
        return nx.relabel_nodes(g, {(r, c): f"g{r}_{c}" for r, c in g.nodes})
    if family == GraphFamily.TREE:
        if size < 1:
            raise InvalidConfig(f"tree depth must be >= 1, got {size}")
        g = nx.balanced_tree(2, size)
    elif family == GraphFamily.CYCLE:
        if size < 3:
            raise InvalidConfig(f"cycle needs >= 3 vertices, got {size}")
        g = nx.cycle_graph(size)
    else:
        if size < 2:
            raise InvalidConfig(f"complete graph needs >= 2 vertices, got {size}")
        g = nx.complete_graph(size)
    return nx.relabel_nodes(g, {v: f"v{v}" for v in g.nodes})


def to_network(g: nx.Graph) -> RoadNetwork:
    """Every edge becomes a bidirectional 1 m segment at 1 m/s"""
    segments = [
        RoadSegment(id=f"s{k}", from_=str(u), to=str(v), length_m=1.0, speed_limit_mps=1.0, bidirectional=True)
        for k, (u, v) in enumerate(g.edges)
    ]
    return RoadNetwork(segments=tuple(segments))


def family_network(family: GraphFamily, size: int) -> RoadNetwork:
    g = family_graph(family, size)
    logger.info(f"[BENCH] family={GraphFamily(family).value} size={size}: {g.number_of_nodes()} vertices, {g.number_of_edges()} edges")
    return to_network(g)
