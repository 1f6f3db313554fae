"""End-to-end checks on small exact oracles and the synthetic graph families"""
import json
import math

import networkx as nx
import numpy as np
import pytest

from tdm_embed.main import main
from tdm_embed.models import KLayout, Layout, TimeDistanceMatrix
from tdm_embed.schemas import InitMode, RunConfig
from tdm_embed.services.bench_service import BenchService
from tdm_embed.utils.classical import classical_mds
from tdm_embed.utils.kspace import k_distance, k_stress, k_stress_gradient, mobius_add, optimize_joint
from tdm_embed.utils.majorization import bound_fz, majorization_state, run_majorization
from tdm_embed.utils.metric import all_pairs_times, weights
from tdm_embed.utils.runs import median
from tdm_embed.utils.sgd import run_sgd, schedule_for
from tdm_embed.utils.stress import pairwise_distances, procrustes_align, stress, stress_gradient


def unit_k4():
    d = TimeDistanceMatrix(np.ones((4, 4)) - np.eye(4))
    return d, weights(d, alpha=0)


def central_differences(f, x, h=1e-6):
    out = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        up, down = x.copy(), x.copy()
        up[idx] += h
        down[idx] -= h
        out[idx] = (f(up) - f(down)) / (2 * h)
    return out


def test_classical_recovers_point_sets():
    rng = np.random.default_rng(100)
    for _ in range(50):
        n = int(rng.integers(2, 11))
        dims = int(rng.integers(1, 4))
        points = rng.normal(size=(n, dims))
        x = classical_mds(TimeDistanceMatrix(pairwise_distances(points)), min(dims, n))
        if x.dims < dims:
            x = Layout(np.pad(x.coords, ((0, 0), (0, dims - x.dims))))
        assert procrustes_align(Layout(points), x)[1] <= 1e-6


@pytest.mark.slow
def test_majorization_never_increases_stress(metric_of):
    instances = [metric_of("grid", 4), metric_of("tree", 3), metric_of("cycle", 10)]
    for run in range(100):
        d, w = instances[run % 3]
        _, record = run_majorization(d, w, 2, init=InitMode.RANDOM, max_iter=60, tol=0.0, seed=run)
        traj = record.trajectory_raw
        assert all(b <= a * (1 + 1e-12) for a, b in zip(traj, traj[1:]))


def test_majorizing_bound_holds():
    rng = np.random.default_rng(300)
    for _ in range(200):
        n = int(rng.integers(2, 9))
        d = TimeDistanceMatrix(pairwise_distances(rng.normal(size=(n, 4))))
        w = weights(d, alpha=int(rng.integers(0, 3)))
        z = Layout(rng.normal(size=(n, 2)))
        x = Layout(rng.normal(size=(n, 2)))
        state = majorization_state(z, d, w)
        assert bound_fz(x, state, d, w) >= stress(x, d, w).raw * (1 - 1e-12)
        assert bound_fz(z, state, d, w) == pytest.approx(stress(z, d, w).raw, rel=1e-9)


@pytest.mark.slow
def test_k4_cannot_be_drawn_in_the_plane(k4_oracle):
    d, w = unit_k4()
    assert stress(classical_mds(d, 2), d, w).raw >= k4_oracle - 1e-9

    finals = []
    for seed in range(20):
        _, record = run_majorization(d, w, 2, init=InitMode.RANDOM, max_iter=3000, tol=1e-12, seed=seed)
        finals.append(record.final.raw)
        _, sgd = run_sgd(d, w, 2, schedule_for(w, 30), seed=seed)
        assert sgd.final.raw >= k4_oracle - 1e-9
    assert min(finals) >= k4_oracle - 1e-9
    assert min(finals) <= k4_oracle + 1e-6


def test_gradients_match_central_differences():
    rng = np.random.default_rng(500)
    for _ in range(20):
        n = int(rng.integers(3, 8))
        d = TimeDistanceMatrix(pairwise_distances(rng.normal(size=(n, 3))))
        w = weights(d)
        coords = rng.normal(size=(n, 2))
        grad = stress_gradient(Layout(coords), d, w)
        numeric = central_differences(lambda c: stress(Layout(c), d, w).raw, coords)
        assert np.linalg.norm(grad - numeric) <= 1e-5 * max(np.linalg.norm(numeric), 1e-8)

    for _ in range(20):
        n = int(rng.integers(3, 8))
        d = TimeDistanceMatrix(pairwise_distances(rng.normal(size=(n, 3))))
        w = weights(d)
        kappa = float(rng.uniform(-2.0, 2.0))
        coords = rng.uniform(-0.3, 0.3, size=(n, 2))
        grad = k_stress_gradient(KLayout(coords, kappa), d, w)
        numeric = central_differences(lambda c: k_stress(KLayout(c, kappa), d, w).raw, coords)
        assert np.linalg.norm(grad - numeric) <= 1e-4 * max(np.linalg.norm(numeric), 1e-8)


@pytest.fixture(scope="module")
def grid_bench():
    cfg = RunConfig(family="grid", size=6, alpha=2, dims=2, seeds=25, iters=15, jobs=1)
    return BenchService(cfg).run()


@pytest.mark.slow
def test_sgd_is_more_consistent_than_majorization(grid_bench):
    sgd = grid_bench.optimizers["sgd"].budget
    majorization = grid_bench.optimizers["majorization"].budget
    assert sgd.cv <= majorization.cv


@pytest.mark.slow
def test_sgd_needs_fewer_iterations(grid_bench):
    sgd = grid_bench.optimizers["sgd"].median_iterations_to_threshold
    majorization = grid_bench.optimizers["majorization"].median_iterations_to_threshold
    assert sgd <= majorization


@pytest.mark.slow
def test_pentagon_prefers_positive_curvature(metric_of):
    d, w = metric_of("cycle", 5)
    good = 0
    for seed in range(10):
        x, record = optimize_joint(d, w, 2, seed=seed, steps=3000, lr_x=0.5, lr_kappa=0.1)
        if record.final.normalized <= 0.01 and x.kappa.kappa > 0:
            good += 1
    assert good >= 8


@pytest.mark.slow
def test_tree_prefers_negative_curvature(metric_of):
    d, w = metric_of("tree", 3)
    kappas, finals = [], []
    for seed in range(10):
        x, record = optimize_joint(d, w, 2, seed=seed, steps=3000, lr_x=0.5, lr_kappa=0.1)
        kappas.append(x.kappa.kappa)
        finals.append(record.final.normalized)
    _, euclidean = run_majorization(d, w, 2)
    assert median(kappas) < 0
    assert median(finals) < euclidean.final.normalized


def test_all_pairs_times_matches_enumeration(digraph):
    rng = np.random.default_rng(1000)
    for _ in range(100):
        g = digraph(rng, int(rng.integers(1, 9)))
        m = all_pairs_times(g)
        nxg = nx.DiGraph()
        nxg.add_nodes_from(g.vertices)
        nxg.add_weighted_edges_from((a.tail, a.head, a.travel_time) for a in g.arcs)
        for i, s in enumerate(g.vertices):
            for j, t in enumerate(g.vertices):
                if i == j:
                    assert m[i, j] == 0.0
                    continue
                times = [nx.path_weight(nxg, p, "weight") for p in nx.all_simple_paths(nxg, s, t)]
                assert m[i, j] == (min(times) if times else math.inf)
        n = g.n
        for k in range(n):
            assert np.all(m <= m[:, [k]] + m[[k], :])


KAPPA_GRID = (-1.0, -0.1, 0.0, 0.1, 1.0)


def in_domain_pair(rng, kappa):
    radius = 0.45 / math.sqrt(abs(kappa)) if kappa else 1.0
    return rng.uniform(-radius, radius, size=(2, 2)) / math.sqrt(2)


@pytest.mark.parametrize("kappa", KAPPA_GRID)
def test_gyro_identities(kappa):
    rng = np.random.default_rng(1100)
    for _ in range(100):
        x, y = in_domain_pair(rng, kappa)
        np.testing.assert_allclose(mobius_add(x, np.zeros(2), kappa), x, atol=1e-12)
        np.testing.assert_allclose(mobius_add(np.zeros(2), y, kappa), y, atol=1e-12)
        np.testing.assert_allclose(mobius_add(-x, x, kappa), np.zeros(2), atol=1e-10)
        np.testing.assert_allclose(mobius_add(-x, mobius_add(x, y, kappa), kappa), y, atol=1e-10)
        if kappa == 0.0:
            np.testing.assert_allclose(mobius_add(x, y, kappa), x + y, atol=1e-12)
        assert k_distance(x, y, kappa) == pytest.approx(k_distance(y, x, kappa), rel=1e-10, abs=1e-14)
        assert k_distance(x, x, kappa) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("kappa", [1e-6, -1e-6, 1e-9, -1e-9, 0.0])
def test_flat_limit(kappa):
    rng = np.random.default_rng(1200)
    for _ in range(100):
        # inside the 0.1 disk
        x, y = rng.uniform(-0.07, 0.07, size=(2, 2))
        flat = float(np.linalg.norm(x - y))
        assert abs(k_distance(x, y, kappa) / 2 - flat) <= 1e-6 * flat + 1e-12


@pytest.mark.slow
def test_bench_complete_graph_reaches_k4_optimum(tmp_path, k4_oracle):
    out = tmp_path / "k4.json"
    argv = ["bench", "--family", "complete", "--size", "4", "--alpha", "0", "--seeds", "20",
            "--max-iter", "3000", "--tol", "1e-12", "--jobs", "1", "--out", str(out)]
    assert main(argv) == 0
    report = json.loads(out.read_text())
    best = min(o["converged"]["min"] for o in report["optimizers"].values())
    # unit K4: normalized stress is raw stress over the 6 pairs
    assert best * 6 == pytest.approx(k4_oracle, abs=1e-6)
    assert best * 6 >= k4_oracle - 1e-9


def test_repeated_runs_write_identical_files(tmp_path, write_network, seg):
    network = write_network(
        [seg("a", "A", "B", bidirectional=True), seg("b", "B", "C", length=300.0), seg("c", "C", "A", bidirectional=True)]
    )
    produced = []
    for name in ("first", "second"):
        folder = tmp_path / name
        assert main(["embed", str(network), "--optimizer", "majorization", "--init", "random", "--seed", "3",
                     "--out", str(folder / "map.json"), "--svg", str(folder / "map.svg")]) == 0
        assert main(["bench", "--family", "cycle", "--size", "6", "--seeds", "3", "--jobs", "1",
                     "--out", str(folder / "bench.json"), "--plot", str(folder / "bench.svg")]) == 0
        produced.append({p.name: p.read_bytes() for p in sorted(folder.iterdir())})
    assert produced[0] == produced[1]
    assert set(produced[0]) == {"map.json", "map.trajectory.jsonl", "map.svg", "bench.json", "bench.svg"}
