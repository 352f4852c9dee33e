import numpy as np
import pytest

from cod.dataset import LabeledDataset
from cod.graph import (DistanceMatrix, knn_sets, mutual_knn_graph,
                       pairwise_distances, write_edge_list)
from oracles import brute_distance_matrix, brute_knn, brute_mutual_edges


def make_ds(features):
    features = np.asarray(features, dtype=float)
    labels = np.ones(len(features), dtype=int)
    return LabeledDataset(features, labels, 1)


def random_ds(rng, n, dims):
    return LabeledDataset(rng.normal(size=(n, dims)), np.ones(n, dtype=int), 1)


class TestPairwiseDistances:
    def test_three_four_five(self):
        dm = pairwise_distances(make_ds([[0, 0], [3, 4]]))
        assert dm.d[0, 1] == 5.0

    def test_identical_points(self):
        dm = pairwise_distances(make_ds([[1, 2], [1, 2]]))
        assert dm.d[0, 1] == 0.0

    def test_matches_reference_loop_exactly(self):
        rng = np.random.default_rng(7)
        x = rng.normal(size=(20, 5))
        dm = pairwise_distances(make_ds(x))
        np.testing.assert_array_equal(dm.d, brute_distance_matrix(x))

    def test_symmetric_zero_diagonal(self):
        rng = np.random.default_rng(8)
        dm = pairwise_distances(random_ds(rng, 30, 3))
        np.testing.assert_array_equal(dm.d, dm.d.T)
        assert (np.diag(dm.d) == 0).all()

    def test_unknown_metric(self):
        with pytest.raises(ValueError):
            pairwise_distances(make_ds([[0.0], [1.0]]), metric="manhattan")


class TestKnnSets:
    def test_collinear_points(self):
        dm = pairwise_distances(make_ds([[0.0], [1.0], [3.0]]))
        nbrs = knn_sets(dm, 1)
        assert [n.tolist() for n in nbrs] == [[1], [0], [1]]

    def test_tie_broken_by_lower_index(self):
        dm = pairwise_distances(make_ds([[0.0], [1.0], [-1.0]]))
        nbrs = knn_sets(dm, 1)
        assert nbrs[0].tolist() == [1]

    def test_matches_full_sort_oracle(self):
        rng = np.random.default_rng(9)
        dm = pairwise_distances(random_ds(rng, 50, 4))
        for k in [1, 3, 10, 49]:
            got = [n.tolist() for n in knn_sets(dm, k)]
            assert got == brute_knn(dm.d, k)

    @pytest.mark.parametrize("k", [0, 50, -2])
    def test_k_out_of_range(self, k):
        dm = pairwise_distances(make_ds([[float(i)] for i in range(50)]))
        with pytest.raises(ValueError):
            knn_sets(dm, k)


class TestMutualKnnGraph:
    def test_line_mutuality(self):
        g = mutual_knn_graph(make_ds([[0.0], [1.0], [3.0]]), k=1)
        assert g.edge_list() == [(0, 1, 0.5)]
        assert g.degree(2) == 0

    def test_coincident_points_weight_one(self):
        g = mutual_knn_graph(make_ds([[2.0, 2.0], [2.0, 2.0], [9.0, 9.0]]), k=1)
        assert (0, 1, 1.0) in g.edge_list()

    def test_matches_mutuality_oracle(self):
        rng = np.random.default_rng(10)
        ds = random_ds(rng, 50, 3)
        g = mutual_knn_graph(ds, k=5)
        expected = brute_mutual_edges(brute_distance_matrix(ds.features), 5)
        got = {(i, j): w for i, j, w in g.edge_list()}
        assert got.keys() == expected.keys()
        for edge, w in expected.items():
            assert got[edge] == w

    def test_degree_bounded_by_k(self):
        rng = np.random.default_rng(11)
        g = mutual_knn_graph(random_ds(rng, 60, 2), k=7)
        assert max(g.degree(v) for v in range(g.n_nodes)) <= 7

    def test_weights_in_unit_interval(self):
        rng = np.random.default_rng(12)
        g = mutual_knn_graph(random_ds(rng, 40, 3), k=6)
        weights = np.array([w for _, _, w in g.edge_list()])
        assert ((weights > 0) & (weights <= 1)).all()

    def test_no_self_loops_and_symmetry(self):
        rng = np.random.default_rng(13)
        g = mutual_knn_graph(random_ds(rng, 30, 2), k=4)
        adj = g.adjacency.toarray()
        assert (np.diag(adj) == 0).all()
        np.testing.assert_array_equal(adj, adj.T)

    def test_edge_set_monotone_in_k(self):
        rng = np.random.default_rng(14)
        ds = random_ds(rng, 40, 3)
        for k in range(1, 8):
            smaller = {(i, j) for i, j, _ in mutual_knn_graph(ds, k).edge_list()}
            larger = {(i, j) for i, j, _ in mutual_knn_graph(ds, k + 1).edge_list()}
            assert smaller <= larger


def test_write_edge_list(tmp_path):
    g = mutual_knn_graph(make_ds([[0.0], [1.0], [3.0]]), k=1)
    path = tmp_path / "edges.txt"
    write_edge_list(g, path)
    assert path.read_text() == "0 1 0.5\n"


def test_distance_matrix_must_be_square():
    with pytest.raises(ValueError):
        DistanceMatrix(np.zeros((2, 3)))
