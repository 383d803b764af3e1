"""Scalar-loop reference implementations and small fixtures shared by the tests"""

import math

import numpy as np

from latent_graph.datasets import Dataset


def list_approx(l1, l2, rel=0.01):
    assert len(l1) == len(l2)
    for i, (x1, x2) in enumerate(zip(l1, l2)):
        assert abs((x1 - x2) / x2) < rel, f"Element {i} differs: {x1}, {x2}"


#
# Scalar oracles
#


def scalar_bce(target, logits, cells):
    total = 0.0
    for i, j in cells:
        t, z = target[i][j], logits[i][j]
        s = 1.0 / (1.0 + math.exp(-z))
        total += -(t * math.log(s) + (1 - t) * math.log(1 - s))
    return total / len(cells)


def scalar_mse(target, pred, cells):
    return sum((target[i][j] - pred[i][j]) ** 2 for i, j in cells) / len(cells)


def scalar_cross_entropy(logits, labels, rows):
    total = 0.0
    for r in rows:
        row = list(logits[r])
        top = max(row)
        log_z = top + math.log(sum(math.exp(v - top) for v in row))
        total += log_z - row[labels[r]]
    return total / len(rows)


def scalar_cosine(a, b):
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(y * y for y in b))
    if na == 0 or nb == 0:
        return 0.0
    return dot / (na * nb)


def brute_knn(X, k):
    """{(i, j): weight} of the top-k cosine neighbours, ties to the lower index"""
    n = len(X)
    result = {}
    for i in range(n):
        sims = [(-scalar_cosine(X[i], X[j]), j) for j in range(n) if j != i]
        for neg, j in sorted(sims)[:k]:
            result[(i, j)] = -neg
    return result


def dense_process(raw, p_kind="relu", sym_mode="mean", norm_mode="symmetric", add_self_loops=False, eps=1e-10):
    """Single-expression dense evaluation of the adjacency processor"""
    if p_kind == "relu":
        p = np.maximum(raw, 0.0)
    else:
        p = np.where(raw > 0, raw, np.expm1(np.minimum(raw, 0.0))) + 1.0
    s = {"mean": (p + p.T) / 2, "max": np.maximum(p, p.T), "none": p}[sym_mode]
    if add_self_loops:
        s = s + np.eye(len(s))
    deg = s.sum(axis=1)
    deg = np.where(deg > 0, deg, eps)
    if norm_mode == "symmetric":
        d = deg**-0.5
        return s * d[:, None] * d[None, :]
    return s / deg[:, None]


def scalar_gcn(A, X, W1, W2):
    """A relu(A X W1) W2 with explicit loops"""
    n, f = len(X), len(X[0])
    h, c = len(W1[0]), len(W2[0])
    xw = [[sum(X[i][l] * W1[l][j] for l in range(f)) for j in range(h)] for i in range(n)]
    hid = [[max(0.0, sum(A[i][m] * xw[m][j] for m in range(n))) for j in range(h)] for i in range(n)]
    hw = [[sum(hid[i][l] * W2[l][j] for l in range(h)) for j in range(c)] for i in range(n)]
    return [[sum(A[i][m] * hw[m][j] for m in range(n)) for j in range(c)] for i in range(n)]


#
# Fixtures
#


def binary_features(n, f, seed=0, density=0.4):
    rng = np.random.default_rng(seed)
    X = (rng.random((n, f)) < density).astype(np.float64)
    X[np.arange(n), rng.integers(f, size=n)] = 1.0
    return X


def small_dataset(n=12, f=6, classes=3, seed=0):
    X = binary_features(n, f, seed)
    y = np.arange(n) % classes
    return Dataset(X, y, np.arange(6), np.arange(6, 9), np.arange(9, n), name="small")


def path_graph_edges(n):
    return [(i, i + 1) for i in range(n - 1)]
