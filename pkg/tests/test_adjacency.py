import math

import numpy as np
import pytest

from latent_graph.adjacency import adjacency_dropout, apply_p, normalize, process, symmetrize, to_fixed
from latent_graph.numerics import SparseGraph, SparseNode, finite_diff_check, mul, param, total

from testlib import dense_process


def test_apply_p():
    np.testing.assert_array_equal(apply_p(np.array([[-2.0, 3.0]]), "relu"), [[0.0, 3.0]])
    out = apply_p(np.array([[0.0, -30.0, -1.0, 2.0]]), "elu_plus_one")
    assert out[0, 0] == 1.0
    assert out[0, 1] == pytest.approx(0.0, abs=1e-12)
    assert out[0, 2] == pytest.approx(math.exp(-1), abs=1e-15)
    assert out[0, 3] == 3.0
    with pytest.raises(ValueError):
        apply_p(np.zeros((1, 1)), "sigmoid")


class TestSymmetrize:
    def test_modes(self):
        a = np.array([[0.0, 2.0], [0.0, 0.0]])
        np.testing.assert_array_equal(symmetrize(a, "mean"), [[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_array_equal(symmetrize(a, "max"), [[0.0, 2.0], [2.0, 0.0]])
        assert symmetrize(a, "none") is a

    @pytest.mark.parametrize("mode", ["mean", "max", "none"])
    def test_symmetric_input_unchanged(self, mode):
        a = np.array([[0.0, 0.3, 1.0], [0.3, 0.0, 0.0], [1.0, 0.0, 0.5]])
        np.testing.assert_array_equal(symmetrize(a, mode), a)

    def test_sparse_matches_dense(self):
        g = SparseGraph(3, [0, 1, 2], [1, 2, 1], [2.0, 0.5, 1.5])
        for mode in ("mean", "max"):
            np.testing.assert_array_equal(symmetrize(g, mode).to_dense(), symmetrize(g.to_dense(), mode))


class TestNormalize:
    def test_two_nodes(self):
        a = np.array([[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_array_equal(normalize(a), a)

    def test_star(self):
        star = SparseGraph.from_edges(3, [(0, 1), (0, 2)])
        A = normalize(star)
        assert A.to_dense()[0, 1] == pytest.approx(1 / math.sqrt(2), abs=1e-15)
        dense = normalize(star.to_dense())
        assert dense[0, 2] == pytest.approx(1 / math.sqrt(2), abs=1e-15)

    def test_row_mode_sums_to_one(self):
        a = np.random.default_rng(0).random((6, 6))
        a[3] = 0.0
        rows = normalize(a, "row").sum(axis=1)
        np.testing.assert_allclose(np.delete(rows, 3), 1.0, atol=1e-14)
        assert rows[3] == 0.0

    def test_self_loops(self):
        a = np.array([[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_allclose(normalize(a, add_self_loops=True), np.full((2, 2), 0.5), atol=1e-15)


class TestProcess:
    def test_dense_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            raw = rng.normal(size=(10, 10))
            for p_kind in ("relu", "elu_plus_one"):
                out = process(raw, p_kind)
                assert np.max(np.abs(out - dense_process(raw, p_kind))) < 1e-12

    def test_sparse_oracle(self):
        rng = np.random.default_rng(2)
        raw = rng.random((10, 10)) * (rng.random((10, 10)) < 0.4)
        np.fill_diagonal(raw, 0.0)
        raw[:, 0] += 0.1
        out = process(SparseGraph.from_dense(raw), "relu", "max", "row")
        assert np.max(np.abs(out.to_dense() - dense_process(raw, "relu", "max", "row"))) < 1e-12

    def test_one_directed_edge(self):
        g = SparseGraph(2, [0], [1], [2.0])
        assert process(g).to_dense()[1, 0] == pytest.approx(1.0, abs=1e-15)
        assert symmetrize(g, "mean").to_dense()[1, 0] == 1.0
        assert symmetrize(g, "max").to_dense()[1, 0] == 2.0

    def test_bitwise_symmetric_and_non_negative(self):
        raw = np.random.default_rng(3).normal(size=(12, 12))
        for sym_mode in ("mean", "max"):
            A = process(raw, "elu_plus_one", sym_mode)
            assert np.array_equal(A, A.T)
            assert np.all(A >= 0)

    def test_scale_invariance(self):
        raw = np.random.default_rng(4).random((8, 8))
        np.testing.assert_allclose(process(raw), process(3.5 * raw), atol=1e-14)

    def test_differentiable(self):
        rng = np.random.default_rng(5)
        raw = param(rng.normal(size=(6, 6)))
        weights = rng.normal(size=(6, 6))
        assert finite_diff_check(lambda: total(mul(process(raw, "elu_plus_one"), weights)), [raw]) < 1e-5

    def test_sparse_differentiable(self):
        rng = np.random.default_rng(6)
        g = SparseGraph.from_dense(rng.random((6, 6)) * (rng.random((6, 6)) < 0.5) + np.eye(6))
        values = param(np.array(g.weights) + 0.1)
        weights = rng.normal(size=6 * 6)

        def evaluate():
            A = process(SparseNode(g.n, g.rows, g.cols, values), "relu")
            return total(mul(A.values, weights[A.keys]))

        assert finite_diff_check(evaluate, [values]) < 1e-5


def test_adjacency_dropout():
    a = SparseGraph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    assert adjacency_dropout(a, 0.5, None, training=False) is a
    dropped = adjacency_dropout(a, 0.5, np.random.default_rng(0))
    assert set(np.unique(dropped.weights)) <= {0.0, 2.0}
    assert dropped.nnz == a.nnz


def test_to_fixed():
    node = SparseNode(2, [0, 1], [1, 0], param(np.array([0.5, 0.5])))
    fixed = to_fixed(node)
    assert isinstance(fixed, SparseGraph)
    assert fixed.entries == [(0, 1, 0.5), (1, 0, 0.5)]
    assert isinstance(to_fixed(param(np.eye(2))), np.ndarray)
