"""Shared fixtures: small networks, metrics of the synthetic families, the K4 oracle"""
import json
from pathlib import Path

import numpy as np
import pytest

from tdm_embed.models import Arc, RoadGraph, TimeDistanceMatrix
from tdm_embed.utils.families import family_network
from tdm_embed.utils.metric import all_pairs_times, symmetrize, weights
from tdm_embed.utils.road_graph import build_graph

FIXTURES = Path(__file__).parent / "fixtures"


def segment(sid, a, b, length=100.0, speed=10.0, bidirectional=False):
    return {
        "id": sid,
        "from": a,
        "to": b,
        "length_m": length,
        "speed_limit_mps": speed,
        "bidirectional": bidirectional,
    }


def network_json(segments, entries=(), exits=()) -> str:
    return json.dumps({"segments": list(segments), "entries": list(entries), "exits": list(exits)})


def family_metric(family, size, alpha=2):
    graph = build_graph(family_network(family, size))
    d = symmetrize(all_pairs_times(graph), ids=graph.vertices)
    return d, weights(d, alpha)


def random_digraph(rng: np.random.Generator, n: int, p: float = 0.35) -> RoadGraph:
    """Random directed graph with integer arc times 1..9 and no parallel arcs"""
    vertices = tuple(f"n{i}" for i in range(n))
    arcs = []
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < p:
                arcs.append(Arc(vertices[i], vertices[j], float(rng.integers(1, 10)), f"s{i}_{j}"))
    return RoadGraph(vertices=vertices, arcs=tuple(arcs), entries=frozenset(), exits=frozenset())


@pytest.fixture
def p3():
    return TimeDistanceMatrix(np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]]), ids=("a", "b", "c"))


@pytest.fixture(scope="session")
def k4_oracle() -> float:
    return json.loads((FIXTURES / "k4_oracle.json").read_text())["raw_stress"]


@pytest.fixture
def metric_of():
    return family_metric


@pytest.fixture
def write_network(tmp_path):
    def write(segments, entries=(), exits=(), name="network.json") -> Path:
        path = tmp_path / name
        path.write_text(network_json(segments, entries, exits), encoding="utf-8")
        return path

    return write


@pytest.fixture
def seg():
    return segment


@pytest.fixture
def digraph():
    return random_digraph


@pytest.fixture
def net_json():
    return network_json
