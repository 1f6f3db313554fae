import networkx as nx
import numpy as np
import pytest

from tdm_embed.errors import DegreeViolation, InvalidSegment, MalformedFile, NoPath
from tdm_embed.schemas import IngestMode
from tdm_embed.utils.road_graph import build_graph, parse_network, path_between


class TestParseNetwork:
    def test_minimal_file(self, seg, net_json):
        net = parse_network(net_json([seg("s1", "A", "B")], entries=["A"], exits=["B"]))
        assert len(net.segments) == 1
        assert net.segments[0].from_ == "A"
        assert net.entries == frozenset({"A"})

    def test_duplicate_segment_id(self, seg, net_json):
        with pytest.raises(InvalidSegment):
            parse_network(net_json([seg("s1", "A", "B"), seg("s1", "B", "C")]))

    def test_entry_not_an_endpoint(self, net_json):
        with pytest.raises(InvalidSegment):
            parse_network(net_json([], entries=["A"]))

    @pytest.mark.parametrize("length,speed", [(0.0, 10.0), (100.0, 0.0), (-5.0, 10.0), (100.0, -1.0)])
    def test_non_positive_length_or_speed(self, seg, net_json, length, speed):
        with pytest.raises(InvalidSegment):
            parse_network(net_json([seg("s1", "A", "B", length=length, speed=speed)]))

    def test_self_loop(self, seg, net_json):
        with pytest.raises(InvalidSegment):
            parse_network(net_json([seg("s1", "A", "A")]))

    def test_syntax_error(self):
        with pytest.raises(MalformedFile):
            parse_network(b"{not json")

    def test_missing_field(self, net_json):
        with pytest.raises(MalformedFile):
            parse_network(net_json([{"id": "s1", "from": "A", "length_m": 1.0, "speed_limit_mps": 1.0}]))

    def test_error_exit_codes(self, seg, net_json):
        with pytest.raises(InvalidSegment) as exc:
            parse_network(net_json([seg("s1", "A", "A")]))
        assert exc.value.exit_code == 2


class TestBuildGraph:
    def test_arc_time_is_length_over_speed(self, seg, net_json):
        g = build_graph(parse_network(net_json([seg("s1", "A", "B", length=100.0, speed=10.0)])))
        assert g.vertices == ("A", "B")
        assert len(g.arcs) == 1
        assert g.arcs[0].travel_time == 10.0

    def test_bidirectional_segment_gives_two_equal_arcs(self, seg, net_json):
        g = build_graph(parse_network(net_json([seg("s1", "A", "B", length=75.0, speed=5.0, bidirectional=True)])))
        pairs = {(a.tail, a.head): a.travel_time for a in g.arcs}
        assert pairs == {("A", "B"): 15.0, ("B", "A"): 15.0}

    def test_vertices_in_first_appearance_order(self, seg, net_json):
        g = build_graph(parse_network(net_json([seg("s1", "B", "C"), seg("s2", "A", "B")])))
        assert g.vertices == ("B", "C", "A")

    def test_entry_without_outgoing_arc(self, seg, net_json):
        net = parse_network(net_json([seg("s1", "A", "B")], entries=["B"]))
        with pytest.raises(DegreeViolation) as exc:
            build_graph(net)
        assert exc.value.vertex == "B"
        assert "'B'" in exc.value.detail

    def test_exit_without_incoming_arc(self, seg, net_json):
        net = parse_network(net_json([seg("s1", "A", "B")], exits=["A"]))
        with pytest.raises(DegreeViolation) as exc:
            build_graph(net)
        assert exc.value.vertex == "A"

    def test_deterministic(self, seg, net_json):
        text = net_json([seg("s1", "A", "B", bidirectional=True), seg("s2", "B", "C"), seg("s3", "C", "A")])
        assert build_graph(parse_network(text)) == build_graph(parse_network(text))

    def test_time_times_speed_recovers_length(self, seg, net_json):
        rng = np.random.default_rng(3)
        segments = [
            seg(f"s{k}", f"v{k}", f"v{k + 1}", length=float(rng.uniform(1, 5000)), speed=float(rng.uniform(0.5, 40)))
            for k in range(30)
        ]
        net = parse_network(net_json(segments))
        g = build_graph(net)
        by_id = {s.id: s for s in net.segments}
        for arc in g.arcs:
            s = by_id[arc.segment]
            assert abs(arc.travel_time * s.speed_limit_mps - s.length_m) <= 1e-12 * s.length_m

    def test_block_mode(self, seg, net_json):
        net = parse_network(
            net_json([seg("s1", "A", "B", length=100.0), seg("s2", "B", "C", length=300.0)], entries=["A"], exits=["C"])
        )
        g = build_graph(net, IngestMode.BLOCK)
        assert g.vertices == ("s1", "s2")
        assert [(a.tail, a.head, a.travel_time) for a in g.arcs] == [("s1", "s2", 20.0)]
        assert g.entries == frozenset({"s1"})
        assert g.exits == frozenset({"s2"})


class TestPathBetween:
    @pytest.fixture
    def chain(self, seg, net_json):
        return build_graph(parse_network(net_json([seg("s1", "A", "B", length=100.0), seg("s2", "B", "C", length=200.0)])))

    def test_unique_path(self, chain):
        path = path_between(chain, "A", "C")
        assert path.vertices == ("A", "B", "C")
        assert path.total_time == 30.0
        assert [a.segment for a in path.arcs] == ["s1", "s2"]

    def test_start_equals_end(self, chain):
        path = path_between(chain, "A", "A")
        assert path.vertices == ("A",)
        assert path.arcs == ()
        assert path.total_time == 0.0

    def test_direction_respected(self, chain):
        with pytest.raises(NoPath):
            path_between(chain, "B", "A")

    def test_unknown_vertex(self, chain):
        with pytest.raises(NoPath):
            path_between(chain, "A", "Z")

    def test_ties_go_to_smallest_vertex_sequence(self, seg, net_json):
        g = build_graph(
            parse_network(
                net_json([seg("s1", "A", "C"), seg("s2", "C", "D"), seg("s3", "A", "B"), seg("s4", "B", "D")])
            )
        )
        assert path_between(g, "A", "D").vertices == ("A", "B", "D")

    def test_matches_exhaustive_enumeration(self, digraph):
        rng = np.random.default_rng(11)
        for _ in range(40):
            g = digraph(rng, int(rng.integers(2, 9)))
            nxg = nx.DiGraph()
            nxg.add_nodes_from(g.vertices)
            nxg.add_weighted_edges_from((a.tail, a.head, a.travel_time) for a in g.arcs)
            for s in g.vertices:
                for t in g.vertices:
                    if s == t:
                        continue
                    times = [nx.path_weight(nxg, p, "weight") for p in nx.all_simple_paths(nxg, s, t)]
                    if not times:
                        with pytest.raises(NoPath):
                            path_between(g, s, t)
                        continue
                    path = path_between(g, s, t)
                    assert path.total_time == pytest.approx(min(times))
                    assert sum(a.travel_time for a in path.arcs) == pytest.approx(path.total_time)
