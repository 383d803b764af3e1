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

"""Adjacency processor: Ã -> non-negative, symmetric, normalized A.

Every function accepts a dense matrix (ndarray or tape Node) or a sparse one (SparseGraph or
SparseNode) and returns the same representation.
"""

import numpy as np

from .numerics import (
    ShapeError,
    SparseGraph,
    SparseNode,
    add,
    dropout,
    elu,
    gather,
    guarded_power,
    maximum,
    mul,
    relu,
    reshape,
    row_sum,
    scale,
    segment_sum,
    shift,
    sparse_combine,
    sparse_transpose,
    transpose,
    value_of,
)
from .utils import warn

DEGREE_EPS = 1e-10


def _is_sparse(a):
    return isinstance(a, (SparseGraph, SparseNode))


def _sparse_in(a):
    return SparseNode.from_graph(a) if isinstance(a, SparseGraph) else a


def _sparse_out(s, like):
    return s.to_graph() if isinstance(like, SparseGraph) else s


def _square(a):
    shape = np.shape(value_of(a))
    if len(shape) != 2 or shape[0] != shape[1]:
        raise ShapeError(f"adjacency must be square, got {shape}")
    return shape[0]


def _elementwise(a, fn):
    if _is_sparse(a):
        s = _sparse_in(a)
        return _sparse_out(s.with_values(fn(s.values)), a)
    return fn(a)


def elu_plus_one(x):
    return shift(elu(x), 1.0)


def apply_p(a, kind="relu"):
    """Element-wise non-negative map; on sparse input only stored entries are mapped"""
    if kind == "relu":
        return _elementwise(a, relu)
    if kind == "elu_plus_one":
        return _elementwise(a, elu_plus_one)
    raise ValueError(f"unknown P function '{kind}'")


def symmetrize(a, mode="mean"):
    if mode == "none":
        return a
    if mode not in ("mean", "max"):
        raise ValueError(f"unknown symmetrization '{mode}'")

    if _is_sparse(a):
        s = _sparse_in(a)
        t = sparse_transpose(s)
        if mode == "mean":
            both = sparse_combine(s, t, "add")
            out = both.with_values(scale(both.values, 0.5))
        else:
            out = sparse_combine(s, t, "max")
        return _sparse_out(out, a)

    _square(a)
    if mode == "mean":
        return scale(add(a, transpose(a)), 0.5)
    return maximum(a, transpose(a))


def _warn_zero_degree(deg):
    if np.any(value_of(deg) <= 0):
        warn("zero-degree rows in the adjacency are guarded with eps", when="once")


def normalize(a, mode="symmetric", add_self_loops=False, eps=DEGREE_EPS):
    """D^-1/2 A D^-1/2 (symmetric) or D^-1 A (row), degrees from the row sums of the input"""
    if mode not in ("symmetric", "row"):
        raise ValueError(f"unknown normalization '{mode}'")

    if _is_sparse(a):
        s = _sparse_in(a)
        n = s.n
        if add_self_loops:
            eye = SparseNode(n, np.arange(n), np.arange(n), np.ones(n))
            s = sparse_combine(s, eye, "add")
        deg = segment_sum(s.values, s.rows, n)
        _warn_zero_degree(deg)
        if mode == "symmetric":
            d = guarded_power(deg, -0.5, eps)
            factor = mul(gather(d, s.rows), gather(d, s.cols))
        else:
            factor = gather(guarded_power(deg, -1.0, eps), s.rows)
        return _sparse_out(s.with_values(mul(s.values, factor)), a)

    n = _square(a)
    if add_self_loops:
        a = add(a, np.eye(n))
    deg = row_sum(a)
    _warn_zero_degree(deg)
    if mode == "symmetric":
        d = guarded_power(deg, -0.5, eps)
        return mul(a, mul(reshape(d, (n, 1)), reshape(d, (1, n))))
    return mul(a, reshape(guarded_power(deg, -1.0, eps), (n, 1)))


def process(a, p_kind="relu", sym_mode="mean", norm_mode="symmetric", add_self_loops=False):
    """apply_p -> symmetrize -> normalize"""
    return normalize(symmetrize(apply_p(a, p_kind), sym_mode), norm_mode, add_self_loops)


def adjacency_dropout(a, p, rng, training=True):
    """Inverted dropout on the entries of the adjacency"""
    if not training or p <= 0:
        return a
    return _elementwise(a, lambda values: dropout(values, p, rng, training))


def to_fixed(a):
    """Detached copy of a processed adjacency: SparseGraph for sparse input, ndarray for dense"""
    if isinstance(a, SparseNode):
        return a.to_graph()
    if isinstance(a, SparseGraph):
        return a
    return np.array(value_of(a))
