import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from tdm_embed.errors import IdMismatch, MalformedFile
from tdm_embed.models import KLayout, Layout
from tdm_embed.services.export_service import ExportService, dumps
from tdm_embed.services.render_service import RenderService
from tdm_embed.utils.families import family_network
from tdm_embed.utils.road_graph import build_graph
from tdm_embed.utils.runs import make_record

NS = {"svg": "http://www.w3.org/2000/svg"}


@pytest.fixture
def grid():
    return build_graph(family_network("grid", 3))


def spread(graph, rng=None):
    rng = rng or np.random.default_rng(0)
    return Layout(rng.uniform(-0.4, 0.4, size=(graph.n, 2)), ids=graph.vertices)


class TestLayoutSvg:
    def test_counts(self, grid):
        root = ET.fromstring(RenderService.layout_svg(spread(grid), grid))
        assert len(root.findall("svg:line", NS)) == 12
        assert len(root.findall("svg:circle[@class='node']", NS)) == 9
        assert len(root.findall("svg:text", NS)) == 9

    def test_byte_identical(self, grid):
        x = spread(grid)
        assert RenderService.layout_svg(x, grid) == RenderService.layout_svg(x, grid)

    def test_hyperbolic_boundary(self, grid):
        kl = KLayout(spread(grid).coords, -1.0, ids=grid.vertices)
        root = ET.fromstring(RenderService.layout_svg(kl, grid))
        domain = root.findall("svg:circle[@class='domain']", NS)
        assert len(domain) == 1
        assert float(domain[0].get("r")) == pytest.approx(1.0)

    def test_no_boundary_on_sphere(self, grid):
        kl = KLayout(spread(grid).coords, 0.5, ids=grid.vertices)
        root = ET.fromstring(RenderService.layout_svg(kl, grid))
        assert not root.findall("svg:circle[@class='domain']", NS)

    def test_id_mismatch(self, grid):
        x = Layout(np.zeros((grid.n, 2)), ids=tuple(f"x{i}" for i in range(grid.n)))
        with pytest.raises(IdMismatch):
            RenderService.layout_svg(x, grid)

    def test_one_dimensional_layout(self, grid):
        x = Layout(np.arange(grid.n, dtype=float)[:, None], ids=grid.vertices)
        assert ET.fromstring(RenderService.layout_svg(x, grid)).tag == "{http://www.w3.org/2000/svg}svg"


def test_trajectory_plot_one_polyline_per_series():
    svg = RenderService.trajectory_svg({"sgd": [1.0, 0.1, 0.01], "majorization": [1.0, 0.5]})
    assert len(ET.fromstring(svg).findall("svg:polyline", NS)) == 2


def test_mean_trajectory_pads_with_final_value():
    records = [make_record(0, "x", [4.0, 2.0], [4.0, 2.0]), make_record(1, "x", [2.0], [2.0])]
    assert RenderService.mean_trajectory(records) == [3.0, 2.0]


class TestExport:
    def test_dumps_is_canonical(self):
        assert dumps({"b": 1, "a": [1.5]}) == '{\n  "a": [\n    1.5\n  ],\n  "b": 1\n}\n'

    def test_dumps_rejects_nan(self):
        with pytest.raises(ValueError):
            dumps({"x": float("nan")})

    def test_layout_file(self, tmp_path):
        x = Layout(np.array([[0.5, -1.0], [2.0, 0.25]]), ids=("a", "b"))
        path = tmp_path / "layout.json"
        ExportService.write_layout(path, x)
        payload = json.loads(path.read_text())
        assert payload == {"dims": 2, "coords": {"a": [0.5, -1.0], "b": [2.0, 0.25]}}
        back = ExportService.read_layout(path, order=("b", "a"))
        assert back.ids == ("b", "a")
        np.testing.assert_array_equal(back.coords, [[2.0, 0.25], [0.5, -1.0]])

    def test_klayout_file_keeps_kappa(self, tmp_path):
        path = tmp_path / "k.json"
        ExportService.write_layout(path, KLayout(np.array([[0.1, 0.2]]), -2.0, ids=("a",)))
        back = ExportService.read_layout(path)
        assert isinstance(back, KLayout)
        assert back.kappa.kappa == -2.0

    def test_bad_layout_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"dims": 2}')
        with pytest.raises(MalformedFile):
            ExportService.read_layout(path)

    def test_graph_file_reloads(self, tmp_path, grid):
        path = tmp_path / "graph.json"
        ExportService.write_json(path, ExportService.graph_export(grid))
        payload = ExportService.read_json(path)
        assert payload["arcs"][0]["from"] == grid.arcs[0].tail
        assert ExportService.graph_from_payload(payload) == grid

    def test_matrix_csv(self, tmp_path):
        path = tmp_path / "m.csv"
        ExportService.write_text(path, ExportService.matrix_csv(np.array([[0.0, np.inf], [2.5, 0.0]]), ["a", "b"]))
        m, ids = ExportService.read_matrix_csv(path)
        assert ids == ["a", "b"]
        assert m[1, 0] == 2.5 and np.isinf(m[0, 1])

    @pytest.mark.parametrize(
        "text",
        ["", "a,b\n0,1\n", "a,a\n0,1\n1,0\n", "a,b\n0,x\n1,0\n", "a,b\n0,-1\n1,0\n", "a,b\n0,1\n1,0.5\n"],
    )
    def test_malformed_matrix(self, tmp_path, text):
        path = tmp_path / "m.csv"
        path.write_text(text)
        with pytest.raises(MalformedFile):
            ExportService.read_matrix_csv(path)

    def test_trajectory_lines(self):
        record = make_record(0, "kappa-joint", [2.0, 1.0], [0.2, 0.1], kappas=[0.0, -0.5])
        lines = [json.loads(line) for line in ExportService.trajectory_jsonl(record).splitlines()]
        assert lines == [
            {"iter": 1, "stress_raw": 2.0, "stress_norm": 0.2, "kappa": 0.0},
            {"iter": 2, "stress_raw": 1.0, "stress_norm": 0.1, "kappa": -0.5},
        ]
