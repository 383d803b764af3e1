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

"""Random graph models: G(n, m) and Barabási–Albert preferential attachment"""

import networkx as nx
import numpy as np

from .numerics import SparseGraph


def rng_from(seed):
    """PCG64 generator from a seed (or pass a Generator through)"""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def pair_count(n):
    return n * (n - 1) // 2


def _row_start(i, n):
    return i * n - i * (i + 1) // 2


def decode_pairs(ids, n):
    """Map pair ids in [0, C(n,2)) to (i, j), i < j, in row-major upper-triangle order"""
    ids = np.asarray(ids, dtype=np.int64)
    disc = np.sqrt(-8.0 * ids + 4.0 * n * (n - 1) - 7.0)
    i = (n - 2 - np.floor(disc / 2.0 - 0.5)).astype(np.int64)
    i = np.clip(i, 0, max(n - 2, 0))
    # float rounding can be one row off near row starts
    i = np.where(_row_start(i, n) > ids, i - 1, i)
    i = np.where(_row_start(i + 1, n) <= ids, i + 1, i)
    j = ids - _row_start(i, n) + i + 1
    return i, j


def encode_pairs(i, j, n):
    i, j = np.asarray(i, dtype=np.int64), np.asarray(j, dtype=np.int64)
    lo, hi = np.minimum(i, j), np.maximum(i, j)
    return _row_start(lo, n) + hi - lo - 1


def sample_pairs(n, m, rng):
    total = pair_count(n)
    if not 0 <= m <= total:
        raise ValueError(f"m={m} edges do not fit into a simple graph with {n} nodes (at most {total})")
    ids = np.sort(rng.choice(total, m, replace=False)) if m > 0 else np.zeros(0, dtype=np.int64)
    return decode_pairs(ids, n)


def generate_er(n, m, seed=0):
    """Uniform sample from all simple graphs with n nodes and exactly m edges"""
    i, j = sample_pairs(n, m, rng_from(seed))
    return SparseGraph.from_edges(n, zip(i.tolist(), j.tolist()))


def generate_ba(n, m_attach, seed=0):
    g = nx.barabasi_albert_graph(n, m_attach, seed=seed)
    return from_networkx(g)


def from_networkx(g):
    nodes = {v: i for i, v in enumerate(sorted(g.nodes()))}
    edges = {(min(nodes[u], nodes[v]), max(nodes[u], nodes[v])) for u, v in g.edges() if u != v}
    return SparseGraph.from_edges(len(nodes), edges)


def to_networkx(graph, threshold=0.0):
    g = nx.Graph()
    g.add_nodes_from(range(graph.n))
    g.add_edges_from(graph.edge_set(threshold))
    return g
