import numpy as np
import pytest

from tdm_embed.errors import DimensionMismatch
from tdm_embed.models import Layout, TimeDistanceMatrix
from tdm_embed.utils.classical import classical_mds, classical_spectrum, double_center, jacobi_eigh
from tdm_embed.utils.metric import weights
from tdm_embed.utils.stress import pairwise_distances, procrustes_align, stress


def test_jacobi_matches_numpy():
    a = np.random.default_rng(0).normal(size=(7, 7))
    a = a + a.T
    values, vectors = jacobi_eigh(a)
    np.testing.assert_allclose(np.sort(values), np.linalg.eigvalsh(a), atol=1e-9)
    np.testing.assert_allclose(vectors.T @ vectors, np.eye(7), atol=1e-10)
    np.testing.assert_allclose(a @ vectors, vectors * values, atol=1e-8)


def test_double_center_path(p3):
    b = double_center(p3)
    np.testing.assert_allclose(b, [[1, 0, -1], [0, 0, 0], [-1, 0, 1]], atol=1e-12)


def test_double_center_single_point():
    assert double_center(TimeDistanceMatrix(np.zeros((1, 1)))).tolist() == [[0.0]]


def test_double_center_rows_sum_to_zero(metric_of):
    d, _ = metric_of("tree", 3)
    assert np.abs(double_center(d).sum(axis=1)).max() <= 1e-10


def test_path_in_one_dimension(p3):
    x = classical_mds(p3, 1)
    assert x.ids == ("a", "b", "c")
    np.testing.assert_allclose(np.abs(x.coords[:, 0]), [1.0, 0.0, 1.0], atol=1e-10)
    assert x.coords[0, 0] == pytest.approx(-x.coords[2, 0])


def test_recovers_euclidean_points():
    points = np.random.default_rng(4).normal(size=(5, 2))
    d = TimeDistanceMatrix(pairwise_distances(points))
    x = classical_mds(d, 2)
    assert procrustes_align(Layout(points), x)[1] <= 1e-6


def test_single_point():
    x = classical_mds(TimeDistanceMatrix(np.zeros((1, 1))), 1)
    assert x.coords.tolist() == [[0.0]]


@pytest.mark.parametrize("dims", [0, 4])
def test_dims_out_of_range(p3, dims):
    with pytest.raises(DimensionMismatch):
        classical_mds(p3, dims)


def test_deterministic(metric_of):
    d, _ = metric_of("grid", 3)
    np.testing.assert_array_equal(classical_mds(d, 2).coords, classical_mds(d, 2).coords)


def test_negative_mass_share(metric_of):
    _, _, euclidean = classical_spectrum(TimeDistanceMatrix(pairwise_distances(np.eye(3))))
    assert euclidean <= 1e-10
    d, _ = metric_of("cycle", 5)
    assert classical_spectrum(d)[2] > 0.05


def test_eigenpair_residuals():
    rng = np.random.default_rng(11)
    for n in range(2, 10):
        a = rng.normal(size=(n, n))
        a = a + a.T
        values, vectors = jacobi_eigh(a)
        scale = np.linalg.norm(a)
        for k in range(n):
            v = vectors[:, k]
            assert np.linalg.norm(a @ v - values[k] * v) <= 1e-8 * scale


def test_tiny_off_diagonal_without_overflow():
    a = np.array([[1.0, 1e-10, 0.0], [1e-10, 3.0, 0.5], [0.0, 0.5, 2.0]])
    with np.errstate(over="raise", invalid="raise"):
        values, vectors = jacobi_eigh(a)
    np.testing.assert_allclose(np.sort(values), np.linalg.eigvalsh(a), atol=1e-12)


def test_full_rank_layout_is_exact():
    rng = np.random.default_rng(12)
    for n in range(2, 9):
        d = TimeDistanceMatrix(pairwise_distances(rng.normal(size=(n, n - 1))))
        w = weights(d, alpha=0)
        total = float(np.sum(np.triu(d.d) ** 2))
        assert stress(classical_mds(d, n - 1), d, w).raw <= 1e-8 * total
