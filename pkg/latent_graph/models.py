#
# Copyright 2026 The latent-graph authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .adjacency import adjacency_dropout
from .numerics import (
    ShapeError,
    add,
    as_matrix,
    dropout,
    masked_bce,
    masked_mse,
    matmul,
    param,
    relu,
    scale,
    value_of,
)


def glorot(rng, fan_in, fan_out, name=None):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return param(rng.uniform(-limit, limit, size=(fan_in, fan_out)), name)


def propagate(A, H):
    """A @ H; A=None stands for the identity (no graph)"""
    return H if A is None else matmul(A, H)


#
# GNN_C
#


@dataclass
class ClassifierParams:
    W1: object
    W2: object
    hidden_layers: List[object] = field(default_factory=list)

    @classmethod
    def init(cls, f, hidden, classes, rng, layers=2):
        W1 = glorot(rng, f, hidden, "gcn_w1")
        middle = [glorot(rng, hidden, hidden, f"gcn_h{i}") for i in range(layers - 2)]
        W2 = glorot(rng, hidden, classes, "gcn_w2")
        return cls(W1, W2, middle)

    def parameters(self):
        return [self.W1, *self.hidden_layers, self.W2]

    def snapshot(self):
        return [p.value.copy() for p in self.parameters()]

    def restore(self, values):
        for p, v in zip(self.parameters(), values):
            p.value[...] = v


def classifier_forward(A, X, params, training=False, dropout_hidden=0.5, adj_dropout=0.0, rng=None, adj_rng=None):
    """A ReLU(A X W1) W2, with h->h residual layers in between for deeper configurations"""
    X = as_matrix(X)
    if X.shape[1] != params.W1.shape[0]:
        raise ShapeError(f"features have width {X.shape[1]}, the classifier expects {params.W1.shape[0]}")
    if A is not None:
        A = adjacency_dropout(A, adj_dropout, adj_rng, training)

    h = relu(propagate(A, matmul(X, params.W1)))
    for W in params.hidden_layers:
        h = dropout(h, dropout_hidden, rng, training)
        h = add(h, relu(propagate(A, matmul(h, W))))
    h = dropout(h, dropout_hidden, rng, training)
    return propagate(A, matmul(h, params.W2))


#
# GNN_DAE
#


@dataclass
class DaeParams:
    W1: object
    W2: object

    @classmethod
    def init(cls, f, hidden, rng):
        return cls(glorot(rng, f, hidden, "dae_w1"), glorot(rng, hidden, f, "dae_w2"))

    def parameters(self):
        return [self.W1, self.W2]

    def snapshot(self):
        return [p.value.copy() for p in self.parameters()]

    def restore(self, values):
        for p, v in zip(self.parameters(), values):
            p.value[...] = v


def dae_hidden(f, hidden=512):
    return min(hidden, 2 * f)


def dae_forward(A, X_noisy, params, training=False, dropout_hidden=0.5, adj_dropout=0.0, rng=None, adj_rng=None):
    """Two-layer GCN f -> h_d -> f; raw outputs (logits for BCE, values for MSE)"""
    X_noisy = as_matrix(X_noisy)
    if X_noisy.shape[1] != params.W1.shape[0] or params.W2.shape[1] != X_noisy.shape[1]:
        raise ShapeError(f"features have width {X_noisy.shape[1]}, the denoiser maps {params.W1.shape[0]} features")
    if A is not None:
        A = adjacency_dropout(A, adj_dropout, adj_rng, training)
    h = relu(propagate(A, matmul(X_noisy, params.W1)))
    h = dropout(h, dropout_hidden, rng, training)
    return propagate(A, matmul(h, params.W2))


#
# Noise
#


@dataclass
class NoiseMask:
    idx: Tuple[np.ndarray, np.ndarray]
    noisy_X: np.ndarray
    n_ones: int = 0
    n_zeros: int = 0

    @property
    def size(self):
        return len(self.idx[0])


def noise_count(percent, available):
    """round-half-up of percent% of `available`, at least 1 for a nonzero percentage"""
    if percent <= 0 or available == 0:
        return 0
    count = int(np.floor(percent * available / 100.0 + 0.5))
    return min(max(count, 1), available)


def _cells(flat, shape):
    flat = np.sort(np.asarray(flat, dtype=np.int64))
    return np.unravel_index(flat, shape)


def sample_noise_binary(X, r, eta, rng):
    """Mask r% of the ones (set to 0) and r*eta% of the zeros (kept, used as negatives)"""
    X = as_matrix(X)
    if not np.all((X == 0) | (X == 1)):
        raise ValueError("binary noise needs features in {0, 1}")
    if r * eta > 100:
        raise ValueError(f"r * eta must be <= 100, got {r * eta}")
    ones = np.flatnonzero(X == 1)
    if len(ones) == 0:
        raise ValueError("binary noise needs at least one nonzero feature")
    zeros = np.flatnonzero(X == 0)

    picked_ones = rng.choice(ones, noise_count(r, len(ones)), replace=False)
    picked_zeros = rng.choice(zeros, noise_count(r * eta, len(zeros)), replace=False)

    noisy = X.copy()
    noisy.flat[picked_ones] = 0.0
    idx = _cells(np.concatenate([picked_ones, picked_zeros]), X.shape)
    return NoiseMask(idx, noisy, len(picked_ones), len(picked_zeros))


def sample_noise_continuous(X, r, scheme="zero", sigma=0.1, rng=None):
    X = as_matrix(X)
    if not 0 <= r <= 100:
        raise ValueError(f"r must be a percentage, got {r}")
    picked = rng.choice(X.size, noise_count(r, X.size), replace=False)
    noisy = X.copy()
    if scheme == "zero":
        noisy.flat[picked] = 0.0
    elif scheme == "gaussian":
        noisy.flat[picked] += rng.normal(0.0, sigma, len(picked))
    else:
        raise ValueError(f"unknown continuous noise scheme '{scheme}'")
    return NoiseMask(_cells(picked, X.shape), noisy)


def sample_noise(X, scheme, r, eta, sigma, rng):
    if scheme == "binary":
        return sample_noise_binary(X, r, eta, rng)
    return sample_noise_continuous(X, r, scheme, sigma, rng)


def dae_loss(X, X_hat, noise, scheme):
    if scheme == "binary":
        return masked_bce(X, X_hat, noise.idx)
    return masked_mse(X, X_hat, noise.idx)


def combined_loss(loss_c, loss_dae, lam):
    """L = L_C + lam * L_DAE; loss_dae=None means no self-supervision this step"""
    if lam < 0:
        raise ValueError(f"lam must be >= 0, got {lam}")
    if loss_dae is None:
        return loss_c
    return add(loss_c, scale(loss_dae, lam))


def loss_value(loss):
    return float(value_of(loss))
