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

"""Raw adjacency generators: the fully parameterized FP generator and the kNN(MLP(X)) generators"""

import hashlib
import os
import sys
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from cachetools import LRUCache, cached
from sklearn.metrics.pairwise import cosine_similarity

from .numerics import Node, SparseGraph, SparseNode, add, as_matrix, matmul, mul, pair_cosine, param, relu
from .utils import debug, warn

GENERATOR_KINDS = ("fp", "mlp", "mlp_d")


#
# Caching helpers
#


def make_key(X, k):
    X = np.ascontiguousarray(X, dtype=np.float64)
    return (hashlib.sha1(X.tobytes()).hexdigest(), X.shape, int(k))


def get_size(obj):
    size = sys.getsizeof(obj)
    if isinstance(obj, SparseGraph):
        size += obj.rows.nbytes + obj.cols.nbytes + obj.weights.nbytes
    elif isinstance(obj, np.ndarray):
        size += obj.nbytes
    elif isinstance(obj, (tuple, list)):
        size += sum(get_size(i) for i in obj)
    return size


cache_size = os.environ.get("LGL_CACHE_SIZE_MB")
if cache_size is None:
    cache_size = 64 * 1024 * 1024
else:
    cache_size = int(cache_size) * 1024 * 1024
cache = LRUCache(maxsize=cache_size, getsizeof=get_size)


def clear_cache():
    cache.clear()


#
# kNN graphs
#


@dataclass
class KnnMask:
    """Binary selection M of the top-k neighbours of every node"""

    graph: SparseGraph

    @property
    def rows(self):
        return self.graph.rows

    @property
    def cols(self):
        return self.graph.cols

    @property
    def k(self):
        return self.graph.nnz // self.graph.n if self.graph.n else 0


def _top_k(X, k, quiet=False):
    X = as_matrix(X)
    n = X.shape[0]
    if not 1 <= k < n:
        raise ValueError(f"k must satisfy 1 <= k < n, got k={k} for n={n}")

    zero_rows = np.flatnonzero(~X.any(axis=1))
    if len(zero_rows) > 0 and not quiet:
        warn(f"{len(zero_rows)} all-zero feature row(s) (first: {zero_rows[0]}); their neighbours follow node order")

    sims = cosine_similarity(X)
    np.fill_diagonal(sims, -np.inf)
    # stable sort keeps equal similarities in ascending node order
    order = np.argsort(-sims, axis=1, kind="stable")[:, :k]
    rows = np.repeat(np.arange(n), k)
    cols = order.ravel()
    return KnnMask(SparseGraph(n, rows, cols))


def knn_sparsify(Xp, k):
    """M from an exhaustive top-k search on cosine similarity, S evaluated on the support of M only"""
    Xp = as_matrix(Xp)
    mask = _top_k(Xp, k)
    values = pair_cosine(Xp, mask.rows, mask.cols)
    return mask, values


@cached(cache, key=make_key)
def knn_graph(X, k):
    """Cosine kNN graph A^kNN of the rows of X (self excluded, ties to the lower node index)"""
    mask, values = knn_sparsify(X, k)
    debug(f"kNN graph with n={mask.graph.n}, k={k} built")
    return mask.graph.with_weights(values)


#
# Generators
#


@dataclass
class GeneratorState:
    kind: str
    k: int
    fp_params: Optional[Node] = None
    mlp_weights: List[Node] = field(default_factory=list)
    mlp_biases: List[Node] = field(default_factory=list)
    similarity: str = "cosine"
    reuse_mask: bool = False
    mask: Optional[KnnMask] = field(default=None, repr=False)
    last_mask: Optional[KnnMask] = field(default=None, repr=False)

    def parameters(self):
        if self.kind == "fp":
            return [self.fp_params]
        return list(self.mlp_weights) + list(self.mlp_biases)

    def begin_epoch(self):
        """Forget the cached kNN mask, used with per-epoch mask refresh"""
        self.mask = None

    def snapshot(self):
        return [p.value.copy() for p in self.parameters()]

    def restore(self, values):
        for p, v in zip(self.parameters(), values):
            p.value[...] = v


def fp_preimage(dense, p_kind, floor=-6.0):
    """Parameters whose image under P equals `dense` (up to e^floor on non-edges for elu+1)"""
    if p_kind == "relu":
        return dense.copy()
    theta = np.full_like(dense, floor)
    big = dense >= 1.0
    small = (dense > 0) & ~big
    theta[big] = dense[big] - 1.0
    theta[small] = np.maximum(np.log(dense[small]), floor)
    return theta


def init_generator(X, k, kind="mlp", p_kind="relu", fp_floor=-6.0, initial_graph=None, reuse_mask=False):
    """Generator whose first output is A^kNN (or the initial graph for FP)"""
    X = as_matrix(X)
    f = X.shape[1]
    if kind not in GENERATOR_KINDS:
        raise ValueError(f"unknown generator kind '{kind}'")

    if kind == "fp":
        base = initial_graph if initial_graph is not None else knn_graph(X, k)
        theta = fp_preimage(base.to_dense(), p_kind, fp_floor)
        return GeneratorState(kind, k, fp_params=param(theta, "theta_fp"), reuse_mask=reuse_mask)

    if initial_graph is not None:
        warn("an initial graph is only used by the FP generator and is ignored")
    # the input bias lifts signed columns above the relu kink, the output bias takes it back
    shift = np.maximum(-X.min(axis=0), 0.0) if X.shape[0] else np.zeros(f)
    biases = [param(shift.copy(), "mlp_b1"), param(-shift, "mlp_b2")]

    if kind == "mlp":
        weights = [param(np.eye(f), "mlp_w1"), param(np.eye(f), "mlp_w2")]
    else:
        weights = [param(np.ones(f), "mlp_d1"), param(np.ones(f), "mlp_d2")]
    return GeneratorState(kind, k, mlp_weights=weights, mlp_biases=biases, reuse_mask=reuse_mask)


def mlp_embed(state, X):
    w1, w2 = state.mlp_weights
    b1, b2 = state.mlp_biases
    if state.kind == "mlp":
        return add(matmul(relu(add(matmul(X, w1), b1)), w2), b2)
    # diagonal weights act per feature
    return add(mul(relu(add(mul(X, w1), b1)), w2), b2)


def generate(state, X, mask=None):
    """Raw adjacency Ã: dense Node for FP, SparseNode on the kNN support for MLP / MLP-D.

    `mask` freezes the kNN support; otherwise it is recomputed from the current embedding
    (or reused within an epoch when the state asks for it).
    """
    if state.kind == "fp":
        return state.fp_params

    X = as_matrix(X)
    Xp = mlp_embed(state, X)
    if mask is None:
        mask = state.mask if state.reuse_mask else None
    if mask is None:
        mask = _top_k(Xp.value, state.k, quiet=True)
        if state.reuse_mask:
            state.mask = mask
    values = pair_cosine(Xp, mask.rows, mask.cols)
    state.last_mask = mask
    return SparseNode(X.shape[0], mask.rows, mask.cols, values)
