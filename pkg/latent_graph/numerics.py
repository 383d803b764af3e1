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

"""Dense and sparse linear algebra on numpy / scipy.sparse plus a small reverse-mode tape.

Every operation follows one rule: when any operand is a `Node` the result is a `Node`
recorded on the tape, otherwise the plain value (ndarray, SparseGraph or float) is returned.
All values are float64.
"""

from enum import Enum
from functools import cached_property

import numpy as np
from scipy import sparse


class ShapeError(ValueError):
    pass


class EmptyIndexError(ValueError):
    pass


class NonScalarRootError(ValueError):
    pass


#
# Matrices
#


def as_matrix(data, rows=None, cols=None):
    m = np.asarray(data, dtype=np.float64)
    if rows is not None or cols is not None:
        m = m.reshape(rows if rows is not None else -1, cols if cols is not None else -1)
    if m.ndim != 2:
        raise ShapeError(f"a matrix needs two dimensions, got shape {m.shape}")
    return m


#
# Sparse graphs
#


class SparseGraph:
    """Weighted edge set over n nodes in coordinate form, canonicalized to row-major order.

    The compressed-row view (`csr`) is built lazily on first use.
    """

    def __init__(self, n, rows, cols, weights=None):
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        weights = np.ones(len(rows)) if weights is None else np.asarray(weights, dtype=np.float64).ravel()
        if not len(rows) == len(cols) == len(weights):
            raise ShapeError(f"rows, cols and weights differ in length: {len(rows)}, {len(cols)}, {len(weights)}")
        if len(rows) > 0 and (rows.min() < 0 or cols.min() < 0 or rows.max() >= n or cols.max() >= n):
            raise ShapeError(f"edge index out of range for a graph with {n} nodes")

        order = np.lexsort((cols, rows))
        rows, cols, weights = rows[order], cols[order], weights[order]
        if len(rows) > 1:
            dup = (rows[1:] == rows[:-1]) & (cols[1:] == cols[:-1])
            if dup.any():
                i = int(np.flatnonzero(dup)[0])
                raise ValueError(f"duplicate entry ({rows[i]}, {cols[i]})")

        self.n = int(n)
        self.rows = rows
        self.cols = cols
        self.weights = weights
        for a in (self.rows, self.cols, self.weights):
            a.flags.writeable = False

    @classmethod
    def from_dense(cls, dense, keep_zeros=False):
        dense = as_matrix(dense)
        if dense.shape[0] != dense.shape[1]:
            raise ShapeError(f"adjacency must be square, got {dense.shape}")
        rows, cols = np.nonzero(np.ones_like(dense, dtype=bool) if keep_zeros else dense)
        return cls(dense.shape[0], rows, cols, dense[rows, cols])

    @classmethod
    def from_edges(cls, n, edges, weight=1.0, symmetric=True):
        """Graph from (u, v) pairs; symmetric=True stores both directions"""
        edges = np.asarray(sorted(edges), dtype=np.int64).reshape(-1, 2)
        rows, cols = edges[:, 0], edges[:, 1]
        if symmetric:
            rows, cols = np.concatenate([rows, cols]), np.concatenate([cols, rows])
        return cls(n, rows, cols, np.full(len(rows), weight, dtype=np.float64))

    @property
    def nnz(self):
        return len(self.rows)

    @property
    def shape(self):
        return (self.n, self.n)

    @property
    def entries(self):
        return list(zip(self.rows.tolist(), self.cols.tolist(), self.weights.tolist()))

    @cached_property
    def csr(self):
        return sparse.csr_matrix((self.weights, (self.rows, self.cols)), shape=(self.n, self.n))

    def to_dense(self):
        dense = np.zeros((self.n, self.n))
        dense[self.rows, self.cols] = self.weights
        return dense

    def transpose(self):
        return SparseGraph(self.n, self.cols, self.rows, self.weights)

    def with_weights(self, weights):
        return SparseGraph(self.n, self.rows, self.cols, weights)

    def is_symmetric(self):
        t = self.transpose()
        return (
            np.array_equal(self.rows, t.rows)
            and np.array_equal(self.cols, t.cols)
            and np.array_equal(self.weights, t.weights)
        )

    def row_counts(self):
        return np.bincount(self.rows, minlength=self.n)

    def edge_set(self, threshold=0.0, self_loops=False):
        """Undirected support {(u, v): u < v} of entries with weight > threshold"""
        keep = self.weights > threshold
        u, v = self.rows[keep], self.cols[keep]
        if not self_loops:
            off = u != v
            u, v = u[off], v[off]
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        return set(zip(lo.tolist(), hi.tolist()))

    def equals(self, other):
        return (
            self.n == other.n
            and np.array_equal(self.rows, other.rows)
            and np.array_equal(self.cols, other.cols)
            and np.array_equal(self.weights, other.weights)
        )

    def __repr__(self):
        return f"SparseGraph(n={self.n}, nnz={self.nnz})"


#
# The tape
#


class Op(Enum):
    CONST = "const"
    PARAM = "param"
    MATMUL = "matmul"
    SPMM = "spmm"
    ADD = "add"
    MUL = "mul"
    SCALE = "scale"
    SHIFT = "shift"
    RELU = "relu"
    ELU = "elu"
    MAXIMUM = "maximum"
    TRANSPOSE = "transpose"
    RESHAPE = "reshape"
    SUM = "sum"
    GATHER = "gather"
    SEGMENT_SUM = "segment_sum"
    ROW_SUM = "row_sum"
    POWER = "power"
    DROPOUT = "dropout"
    COSINE = "cosine"
    BCE = "bce"
    MSE = "mse"
    XENT = "xent"


class Node:
    """A value on the tape, its gradient accumulator and the rule to push gradients to its parents"""

    __slots__ = ("value", "grad", "op", "parents", "requires_grad", "name", "_backward")

    def __init__(self, value, op=Op.CONST, parents=(), backward=None, requires_grad=None, name=None):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = None
        self.op = op
        self.parents = tuple(parents)
        if requires_grad is None:
            requires_grad = any(p.requires_grad for p in self.parents)
        self.requires_grad = requires_grad
        self.name = name
        self._backward = backward if requires_grad else None

    @property
    def shape(self):
        return self.value.shape

    def item(self):
        return float(self.value)

    def zero_grad(self):
        self.grad = None

    def gradient(self):
        return np.zeros_like(self.value) if self.grad is None else self.grad

    def accumulate(self, g):
        if not self.requires_grad:
            return
        g = np.asarray(g, dtype=np.float64)
        if g.shape != self.value.shape:
            g = np.broadcast_to(g, self.value.shape)
        self.grad = g.copy() if self.grad is None else self.grad + g

    def __repr__(self):
        label = f" '{self.name}'" if self.name else ""
        return f"Node{label}({self.op.value}, shape={self.value.shape})"


def param(value, name=None):
    return Node(np.array(value, dtype=np.float64, copy=True), Op.PARAM, requires_grad=True, name=name)


def const(value):
    return Node(value, Op.CONST, requires_grad=False)


def value_of(x):
    return x.value if isinstance(x, Node) else x


def _record(value, op, inputs, backward):
    nodes = [x for x in inputs if isinstance(x, Node)]
    if not nodes:
        return value
    return Node(value, op, nodes, backward)


def _push(x, g):
    if isinstance(x, Node):
        x.accumulate(g)


def _unbroadcast(g, shape):
    """Sum a broadcast gradient back to the operand shape"""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


def topological_order(root):
    order, seen, stack = [], set(), [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node.parents:
            if id(p) not in seen:
                stack.append((p, False))
    return order


def backward(root):
    """Accumulate d root / d node into `grad` of every node on the tape that requires it"""
    if not isinstance(root, Node):
        raise TypeError("backward needs a tape Node")
    if root.value.size != 1:
        raise NonScalarRootError(f"backward needs a scalar root, got shape {root.value.shape}")
    root.accumulate(np.ones_like(root.value))
    for node in reversed(topological_order(root)):
        if node._backward is not None and node.grad is not None:  # pylint: disable=protected-access
            node._backward(node.grad)  # pylint: disable=protected-access


#
# Differentiable sparse adjacency
#


class SparseNode:
    """Sparse n x n matrix with a fixed pattern and (possibly differentiable) values"""

    def __init__(self, n, rows, cols, values):
        self.n = int(n)
        self.rows = np.asarray(rows, dtype=np.int64)
        self.cols = np.asarray(cols, dtype=np.int64)
        self.values = values

    @classmethod
    def from_graph(cls, graph):
        return cls(graph.n, graph.rows, graph.cols, np.array(graph.weights))

    @property
    def shape(self):
        return (self.n, self.n)

    @property
    def keys(self):
        return self.rows * self.n + self.cols

    def csr(self):
        return sparse.csr_matrix((value_of(self.values), (self.rows, self.cols)), shape=(self.n, self.n))

    def to_graph(self):
        return SparseGraph(self.n, self.rows, self.cols, np.array(value_of(self.values)))

    def to_dense(self):
        dense = np.zeros((self.n, self.n))
        dense[self.rows, self.cols] = value_of(self.values)
        return dense

    def with_values(self, values):
        return SparseNode(self.n, self.rows, self.cols, values)

    def detach(self):
        return SparseNode(self.n, self.rows, self.cols, np.array(value_of(self.values)))


def pattern_union(n, *patterns):
    """Sorted union of several (rows, cols) patterns and, per pattern, the position of every
    union entry in that pattern (-1 where absent)"""
    keys = [np.asarray(r, dtype=np.int64) * n + np.asarray(c, dtype=np.int64) for r, c in patterns]
    union = np.unique(np.concatenate(keys)) if keys else np.zeros(0, dtype=np.int64)
    positions = []
    for k in keys:
        pos = np.full(len(union), -1, dtype=np.int64)
        pos[np.searchsorted(union, k)] = np.arange(len(k))
        positions.append(pos)
    return union // n, union % n, positions


def sparse_transpose(s):
    rows, cols, (pos,) = pattern_union(s.n, (s.cols, s.rows))
    return SparseNode(s.n, rows, cols, gather(s.values, pos))


def sparse_combine(a, b, how="add"):
    """Entry-wise a + b or max(a, b) over the union of both patterns (absent entries are 0)"""
    rows, cols, (pa, pb) = pattern_union(a.n, (a.rows, a.cols), (b.rows, b.cols))
    va, vb = gather(a.values, pa), gather(b.values, pb)
    if how == "add":
        values = add(va, vb)
    elif how == "max":
        values = maximum(va, vb)
    else:
        raise ValueError(f"unknown combination '{how}'")
    return SparseNode(a.n, rows, cols, values)


#
# Operations
#


def _check_matmul(a_shape, b_shape):
    if len(b_shape) != 2 or a_shape[1] != b_shape[0]:
        raise ShapeError(f"cannot multiply {tuple(a_shape)} by {tuple(b_shape)}")


def matmul(a, b):
    """Matrix product; `a` may be dense (ndarray / Node), a SparseGraph or a SparseNode"""
    if isinstance(a, SparseGraph):
        a = SparseNode.from_graph(a)
    if isinstance(a, SparseNode):
        return _spmm(a, b)

    av, bv = value_of(a), value_of(b)
    _check_matmul(av.shape, bv.shape)
    out = av @ bv

    def _backward(g):
        _push(a, g @ bv.T)
        _push(b, av.T @ g)

    return _record(out, Op.MATMUL, (a, b), _backward)


def _spmm(s, b):
    bv = value_of(b)
    _check_matmul(s.shape, bv.shape)
    csr = s.csr()
    out = np.asarray(csr @ bv)
    values = s.values

    def _backward(g):
        _push(b, np.asarray(csr.T @ g))
        if isinstance(values, Node):
            _push(values, np.einsum("ij,ij->i", g[s.rows], bv[s.cols]))

    return _record(out, Op.SPMM, (values, b), _backward)


def add(a, b):
    av, bv = value_of(a), value_of(b)
    out = av + bv

    def _backward(g):
        _push(a, _unbroadcast(g, np.shape(av)))
        _push(b, _unbroadcast(g, np.shape(bv)))

    return _record(out, Op.ADD, (a, b), _backward)


def mul(a, b):
    av, bv = value_of(a), value_of(b)
    out = av * bv

    def _backward(g):
        _push(a, _unbroadcast(g * bv, np.shape(av)))
        _push(b, _unbroadcast(g * av, np.shape(bv)))

    return _record(out, Op.MUL, (a, b), _backward)


def scale(a, c):
    c = float(c)
    out = value_of(a) * c
    return _record(out, Op.SCALE, (a,), lambda g: _push(a, g * c))


def shift(a, c):
    out = value_of(a) + float(c)
    return _record(out, Op.SHIFT, (a,), lambda g: _push(a, g))


def relu(a):
    av = value_of(a)
    out = np.maximum(av, 0.0)
    return _record(out, Op.RELU, (a,), lambda g: _push(a, g * (av > 0)))


def elu(a):
    av = value_of(a)
    neg = np.expm1(np.minimum(av, 0.0))
    out = np.where(av > 0, av, neg)
    return _record(out, Op.ELU, (a,), lambda g: _push(a, g * np.where(av > 0, 1.0, neg + 1.0)))


def activation(m, kind):
    if kind == "relu":
        return relu(m)
    if kind == "elu":
        return elu(m)
    raise ValueError(f"unknown activation '{kind}'")


def maximum(a, b):
    av, bv = value_of(a), value_of(b)
    out = np.maximum(av, bv)
    first = av >= bv

    def _backward(g):
        _push(a, _unbroadcast(g * first, np.shape(av)))
        _push(b, _unbroadcast(g * ~first, np.shape(bv)))

    return _record(out, Op.MAXIMUM, (a, b), _backward)


def transpose(a):
    out = value_of(a).T
    return _record(out, Op.TRANSPOSE, (a,), lambda g: _push(a, g.T))


def reshape(a, shape):
    av = value_of(a)
    out = av.reshape(shape)
    return _record(out, Op.RESHAPE, (a,), lambda g: _push(a, g.reshape(av.shape)))


def total(a):
    out = np.asarray(value_of(a).sum())
    av_shape = np.shape(value_of(a))
    return _record(out, Op.SUM, (a,), lambda g: _push(a, np.full(av_shape, float(g))))


def gather(a, index):
    """out[e] = a[index[e]], 0 where index[e] == -1"""
    av = value_of(a)
    index = np.asarray(index, dtype=np.int64)
    valid = index >= 0
    out = np.zeros(len(index))
    out[valid] = av[index[valid]]

    def _backward(g):
        ga = np.zeros_like(av)
        np.add.at(ga, index[valid], g[valid])
        _push(a, ga)

    return _record(out, Op.GATHER, (a,), _backward)


def segment_sum(a, segments, n):
    segments = np.asarray(segments, dtype=np.int64)
    out = np.bincount(segments, weights=value_of(a), minlength=n).astype(np.float64)
    return _record(out, Op.SEGMENT_SUM, (a,), lambda g: _push(a, g[segments]))


def row_sum(a):
    av = value_of(a)
    out = av.sum(axis=1)
    return _record(out, Op.ROW_SUM, (a,), lambda g: _push(a, np.broadcast_to(g[:, None], av.shape)))


def guarded_power(a, p, eps=1e-10):
    """x ** p with non-positive x replaced by eps; the guarded entries pass no gradient"""
    av = value_of(a)
    ok = av > 0
    base = np.where(ok, av, eps)
    out = base**p
    return _record(out, Op.POWER, (a,), lambda g: _push(a, g * np.where(ok, p * base ** (p - 1), 0.0)))


def dropout(a, p, rng, training=True):
    """Inverted dropout; the identity when not training or p == 0"""
    if not training or p <= 0:
        return a
    av = value_of(a)
    keep = (rng.random(np.shape(av)) >= p) / (1.0 - p)
    out = av * keep
    return _record(out, Op.DROPOUT, (a,), lambda g: _push(a, g * keep))


def pair_cosine(x, rows, cols):
    """Cosine similarity of the row pairs (rows[e], cols[e]) of x; zero rows have similarity 0"""
    xv = value_of(x)
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    sq = np.einsum("ij,ij->i", xv, xv)
    dots = np.einsum("ij,ij->i", xv[rows], xv[cols])
    denom = np.sqrt(sq[rows] * sq[cols])
    ok = denom > 0
    safe = np.where(ok, denom, 1.0)
    sims = np.where(ok, dots / safe, 0.0)
    out = np.clip(sims, -1.0, 1.0)

    def _backward(g):
        w = np.where(ok, g / safe, 0.0)
        sq_r = np.where(ok, sq[rows], 1.0)
        sq_c = np.where(ok, sq[cols], 1.0)
        grad_r = w[:, None] * xv[cols] - (g * sims / sq_r)[:, None] * xv[rows]
        grad_c = w[:, None] * xv[rows] - (g * sims / sq_c)[:, None] * xv[cols]
        gx = np.zeros_like(xv)
        np.add.at(gx, rows, np.where(ok[:, None], grad_r, 0.0))
        np.add.at(gx, cols, np.where(ok[:, None], grad_c, 0.0))
        _push(x, gx)

    return _record(out, Op.COSINE, (x,), _backward)


#
# Losses
#


def cell_index(idx, shape):
    """Normalize an index set of matrix cells to a (rows, cols) pair of int arrays"""
    if isinstance(idx, np.ndarray) and idx.dtype == bool:
        if idx.shape != tuple(shape):
            raise ShapeError(f"mask shape {idx.shape} does not match {tuple(shape)}")
        rows, cols = np.nonzero(idx)
    else:
        rows, cols = idx
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
    if len(rows) == 0:
        raise EmptyIndexError("the loss is undefined on an empty index set")
    return rows, cols


def _scalar(out, op, inputs, backward):
    result = _record(np.asarray(out), op, inputs, backward)
    return result if isinstance(result, Node) else float(result)


def masked_bce(target, logits, idx):
    """Mean binary cross-entropy with logits over the cells in idx"""
    tv, zv = np.asarray(value_of(target), dtype=np.float64), value_of(logits)
    if tv.shape != zv.shape:
        raise ShapeError(f"target {tv.shape} and logits {zv.shape} differ in shape")
    rows, cols = cell_index(idx, zv.shape)
    t, z = tv[rows, cols], zv[rows, cols]
    if not np.all((t == 0) | (t == 1)):
        raise ValueError("binary cross-entropy needs targets in {0, 1}")
    count = len(z)
    loss = np.sum(np.maximum(z, 0.0) - t * z + np.log1p(np.exp(-np.abs(z)))) / count

    def _backward(g):
        gz = np.zeros_like(zv)
        np.add.at(gz, (rows, cols), float(g) * (_sigmoid(z) - t) / count)
        _push(logits, gz)

    return _scalar(loss, Op.BCE, (logits,), _backward)


def _sigmoid(z):
    e = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def masked_mse(target, pred, idx):
    """Mean squared error over the cells in idx"""
    tv, pv = np.asarray(value_of(target), dtype=np.float64), value_of(pred)
    if tv.shape != pv.shape:
        raise ShapeError(f"target {tv.shape} and prediction {pv.shape} differ in shape")
    rows, cols = cell_index(idx, pv.shape)
    diff = pv[rows, cols] - tv[rows, cols]
    count = len(diff)
    loss = np.sum(diff * diff) / count

    def _backward(g):
        gp = np.zeros_like(pv)
        np.add.at(gp, (rows, cols), float(g) * 2.0 * diff / count)
        _push(pred, gp)

    return _scalar(loss, Op.MSE, (pred,), _backward)


def log_softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=1, keepdims=True))


def softmax(z):
    return np.exp(log_softmax(z))


def softmax_cross_entropy(logits, labels, rows):
    """Mean cross-entropy of softmax(logits[row]) against labels[row] over `rows`"""
    zv = value_of(logits)
    rows = np.asarray(rows, dtype=np.int64).ravel()
    if len(rows) == 0:
        raise EmptyIndexError("cross-entropy is undefined on an empty row set")
    y = np.asarray(labels, dtype=np.int64)[rows]
    if y.min() < 0 or y.max() >= zv.shape[1]:
        raise ValueError(f"labels must lie in [0, {zv.shape[1]})")
    logp = log_softmax(zv[rows])
    count = len(rows)
    loss = -np.sum(logp[np.arange(count), y]) / count

    def _backward(g):
        d = np.exp(logp)
        d[np.arange(count), y] -= 1.0
        gz = np.zeros_like(zv)
        np.add.at(gz, rows, float(g) * d / count)
        _push(logits, gz)

    return _scalar(loss, Op.XENT, (logits,), _backward)


#
# Optimization
#


class Adam:
    """Adam state (moments, step counter, hyperparameters) for a group of parameter nodes"""

    def __init__(self, params, lr=0.001, beta1=0.9, beta2=0.999, eps=1e-8, weight_decay=0.0):
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.weight_decay = weight_decay
        self.m = [np.zeros_like(p.value) for p in self.params]
        self.v = [np.zeros_like(p.value) for p in self.params]
        self.t = 0

    def zero_grad(self):
        for p in self.params:
            p.zero_grad()

    def step(self):
        grads = [p.gradient() for p in self.params]
        if self.weight_decay:
            grads = [g + self.weight_decay * p.value for g, p in zip(grads, self.params)]
        adam_step(self, [p.value for p in self.params], grads)


def adam_step(state, params, grads):
    """One bias-corrected Adam update of the arrays in `params`, in place"""
    if len(params) != len(state.m) or len(grads) != len(params):
        raise ShapeError("parameters, gradients and Adam moments differ in number")
    state.t += 1
    bc1 = 1.0 - state.beta1**state.t
    bc2 = 1.0 - state.beta2**state.t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if p.shape != g.shape or p.shape != m.shape:
            raise ShapeError(f"parameter {p.shape} and gradient {np.shape(g)} differ in shape")
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        p -= state.lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
    return params


def finite_diff_check(evaluate, params, h=1e-5, max_coords=None, rng=None, floor=1e-8, relative_floor=1e-3):
    """Largest relative error between backward() and central differences.

    `evaluate()` must rebuild the loss from the current parameter values and be deterministic
    (dropout off, masks frozen). Up to `max_coords` coordinates per parameter are sampled.
    Errors are taken relative to max(|analytic|, |numeric|, relative_floor * max|gradient|).
    """
    for p in params:
        p.zero_grad()
    backward(evaluate())
    analytic = [p.gradient().copy() for p in params]
    largest = max((float(np.max(np.abs(a))) for a in analytic if a.size), default=0.0)
    floor = max(floor, relative_floor * largest)

    rng = np.random.default_rng(0) if rng is None else rng
    worst = 0.0
    for p, a in zip(params, analytic):
        flat = p.value.reshape(-1)
        coords = np.arange(flat.size)
        if max_coords is not None and flat.size > max_coords:
            coords = np.sort(rng.choice(flat.size, max_coords, replace=False))
        for i in coords:
            orig = flat[i]
            flat[i] = orig + h
            plus = float(value_of(evaluate()))
            flat[i] = orig - h
            minus = float(value_of(evaluate()))
            flat[i] = orig
            numeric = (plus - minus) / (2 * h)
            exact = a.reshape(-1)[i]
            err = abs(exact - numeric) / max(abs(exact), abs(numeric), floor)
            worst = max(worst, err)
    return worst
