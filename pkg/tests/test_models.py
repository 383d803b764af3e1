import math

import numpy as np
import pytest

from latent_graph.adjacency import process
from latent_graph.generators import knn_graph
from latent_graph.models import (
    ClassifierParams,
    DaeParams,
    classifier_forward,
    combined_loss,
    dae_forward,
    dae_hidden,
    dae_loss,
    noise_count,
    sample_noise_binary,
    sample_noise_continuous,
)
from latent_graph.numerics import ShapeError, finite_diff_check, param, softmax_cross_entropy

from testlib import binary_features, scalar_gcn


def rng(seed=0):
    return np.random.default_rng(seed)


class TestClassifier:
    def test_zero_output_weights(self):
        params = ClassifierParams.init(4, 8, 3, rng())
        params.W2.value[...] = 0.0
        logits = classifier_forward(np.eye(5), binary_features(5, 4), params)
        np.testing.assert_array_equal(logits.value, 0.0)

    def test_identity_propagation(self):
        X = binary_features(5, 4)
        params = ClassifierParams(param(np.eye(4)), param(rng().normal(size=(4, 3))))
        logits = classifier_forward(np.eye(5), X, params)
        np.testing.assert_allclose(logits.value, X @ params.W2.value, atol=1e-14)

    def test_scalar_oracle(self):
        X = binary_features(6, 4, seed=1)
        A = process(knn_graph(X, 2))
        params = ClassifierParams.init(4, 5, 3, rng(1))
        logits = classifier_forward(A, X, params)
        expected = scalar_gcn(A.to_dense().tolist(), X.tolist(), params.W1.value.tolist(), params.W2.value.tolist())
        assert np.max(np.abs(logits.value - np.array(expected))) < 1e-10

    def test_shape_mismatch(self):
        params = ClassifierParams.init(4, 8, 3, rng())
        with pytest.raises(ShapeError):
            classifier_forward(np.eye(5), np.ones((5, 3)), params)

    def test_deterministic_without_dropout(self):
        X = binary_features(6, 4)
        A = process(knn_graph(X, 2))
        params = ClassifierParams.init(4, 5, 2, rng())
        first = classifier_forward(A, X, params, training=True, dropout_hidden=0.0).value
        second = classifier_forward(A, X, params, training=True, dropout_hidden=0.0).value
        np.testing.assert_array_equal(first, second)

    def test_depth(self):
        params = ClassifierParams.init(4, 5, 2, rng(), layers=4)
        assert len(params.parameters()) == 4
        assert classifier_forward(np.eye(3), np.ones((3, 4)), params).shape == (3, 2)

    def test_gradient(self):
        X = binary_features(10, 5, seed=2)
        A = process(knn_graph(X, 3))
        params = ClassifierParams.init(5, 6, 3, rng(2))
        y = np.arange(10) % 3

        def evaluate():
            return softmax_cross_entropy(classifier_forward(A, X, params), y, np.arange(6))

        assert finite_diff_check(evaluate, params.parameters()) < 1e-5


class TestDae:
    def test_hidden_width(self):
        assert dae_hidden(1433) == 512
        assert dae_hidden(13) == 26

    def test_output_shape(self):
        X = binary_features(7, 5)
        params = DaeParams.init(5, dae_hidden(5), rng())
        assert dae_forward(np.eye(7), X, params).shape == X.shape

    def test_zero_weights_give_chance_loss(self):
        X = binary_features(8, 6)
        params = DaeParams.init(6, 4, rng())
        params.W1.value[...] = 0.0
        params.W2.value[...] = 0.0
        noise = sample_noise_binary(X, 20, 2, rng())
        X_hat = dae_forward(np.eye(8), noise.noisy_X, params)
        assert float(dae_loss(X, X_hat, noise, "binary").value) == pytest.approx(math.log(2), abs=1e-12)

    def test_gradient_with_frozen_noise(self):
        X = binary_features(10, 5, seed=3)
        A = process(knn_graph(X, 3))
        params = DaeParams.init(5, 6, rng(3))
        noise = sample_noise_binary(X, 20, 2, rng(3))

        def evaluate():
            return dae_loss(X, dae_forward(A, noise.noisy_X, params), noise, "binary")

        assert finite_diff_check(evaluate, params.parameters()) < 1e-5


class TestNoise:
    def test_counts(self):
        X = np.zeros((40, 30))
        X.flat[:200] = 1.0
        noise = sample_noise_binary(X, 10, 5, rng())
        assert noise.n_ones == 20
        assert noise.n_zeros == 500
        assert noise.size == 520

    def test_only_ones_are_removed(self):
        X = binary_features(20, 8)
        noise = sample_noise_binary(X, 10, 5, rng())
        assert np.all(noise.noisy_X <= X)
        rows, cols = noise.idx
        changed = noise.noisy_X != X
        assert np.all(X[changed] == 1.0)
        assert changed.sum() == noise.n_ones
        assert np.all(changed[rows, cols] | (X[rows, cols] == 0))

    def test_all_ones(self):
        X = binary_features(10, 6)
        noise = sample_noise_binary(X, 100, 0.0, rng())
        assert np.all(noise.noisy_X == 0.0)
        assert noise.n_zeros == 0

    def test_binary_errors(self):
        with pytest.raises(ValueError):
            sample_noise_binary(np.zeros((3, 3)), 10, 5, rng())
        with pytest.raises(ValueError):
            sample_noise_binary(np.full((2, 2), 0.5), 10, 5, rng())
        with pytest.raises(ValueError):
            sample_noise_binary(binary_features(4, 4), 50, 5, rng())

    def test_fresh_sample_every_call(self):
        X = binary_features(20, 8)
        generator = rng()
        first = sample_noise_binary(X, 10, 5, generator)
        second = sample_noise_binary(X, 10, 5, generator)
        assert not all(np.array_equal(a, b) for a, b in zip(first.idx, second.idx))

    def test_continuous(self):
        X = rng().normal(size=(10, 10))
        assert sample_noise_continuous(X, 0, rng=rng()).size == 0
        zero = sample_noise_continuous(X, 10, "zero", rng=rng())
        assert zero.size == 10
        changed = np.argwhere(zero.noisy_X != X)
        assert {tuple(c) for c in changed.tolist()} == set(zip(*[i.tolist() for i in zero.idx]))
        flat = sample_noise_continuous(X, 30, "gaussian", sigma=0.0, rng=rng())
        np.testing.assert_array_equal(flat.noisy_X, X)

    def test_rounding(self):
        assert noise_count(10, 15) == 2
        assert noise_count(10, 14) == 1
        assert noise_count(1, 10) == 1
        assert noise_count(0, 10) == 0


def test_combined_loss():
    assert combined_loss(0.5, 0.2, 10.0) == pytest.approx(2.5)
    assert combined_loss(0.5, 0.2, 0.0) == 0.5
    assert combined_loss(0.5, 0.0, 10.0) == 0.5
    assert combined_loss(0.5, None, 10.0) == 0.5
    with pytest.raises(ValueError):
        combined_loss(0.5, 0.2, -1.0)
