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

"""Supervision starvation, homophily and noisy-graph recovery analyses"""

from collections import namedtuple
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy.special import gammaln

from .numerics import SparseGraph, value_of
from .random_graphs import decode_pairs, encode_pairs, pair_count, rng_from, sample_pairs

DEFAULT_BINS = (0.0, 0.001, 0.01, 0.1)
ODDS_CAP = 1e6
SUPPORT_FRACTION = 0.1

RecoveryMetrics = namedtuple("RecoveryMetrics", ["noisy_removed", "removed_recovered"])


class AnalysisError(ValueError):
    pass


def _graph(A):
    if isinstance(A, SparseGraph):
        return A
    if hasattr(A, "to_graph"):
        return A.to_graph()
    return SparseGraph.from_dense(np.asarray(value_of(A)))


def _edge_arrays(A, threshold=0.0):
    edges = sorted(_graph(A).edge_set(threshold))
    if not edges:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    e = np.array(edges, dtype=np.int64)
    return e[:, 0], e[:, 1]


def _labeled_mask(n, labeled):
    mask = np.zeros(n, dtype=bool)
    mask[np.asarray(labeled, dtype=np.int64)] = True
    return mask


#
# Starved edges
#


def starved_prob_er(n, m, q):
    """Probability that a random edge of a G(n, m) graph is starved for a two-layer GCN with
    q uniformly chosen labeled nodes"""
    total = pair_count(n)
    if not 0 <= q <= n:
        raise AnalysisError(f"q must lie in [0, n], got q={q} for n={n}")
    if not 1 <= m <= total:
        raise AnalysisError(f"m must lie in [1, C(n,2)={total}], got {m}")
    if total - 2 * q <= 0:
        raise AnalysisError(f"C(n,2) - 2q must be positive, got n={n}, q={q}")
    if q == 0:
        return 1.0
    first = (1.0 - q / n) * (1.0 - q / (n - 1))
    if first <= 0:
        return 0.0

    ratio = (m - 1) / (total - np.arange(1, 2 * q + 1, dtype=np.float64))
    if np.any(ratio >= 1.0):
        return 0.0
    return float(first * np.exp(np.sum(np.log1p(-ratio))))


def _log_binom(a, b):
    return gammaln(a + 1) - gammaln(b + 1) - gammaln(a - b + 1)


def starved_prob_sf(n, q, gamma):
    """Starved-edge probability in a scale-free network with degree weights k^gamma"""
    if not 0 <= q <= n:
        raise AnalysisError(f"q must lie in [0, n], got q={q} for n={n}")
    if n < 3:
        raise AnalysisError(f"need at least 3 nodes, got {n}")
    if q == 0:
        return 1.0
    first = (1.0 - q / n) * (1.0 - q / (n - 1))
    if first <= 0:
        return 0.0

    k = np.arange(1, n, dtype=np.float64)
    log_weight = gamma * np.log(k)
    weight = np.exp(log_weight - log_weight.max())
    # C(n-q-2, k-1) / C(n-2, k-1), zero once k-1 exceeds n-q-2
    free = n - q - 2
    ok = k - 1 <= free
    ratio = np.zeros_like(k)
    ratio[ok] = np.exp(_log_binom(free, k[ok] - 1) - _log_binom(n - 2, k[ok] - 1))
    unconnected = float(np.sum(weight * ratio) / np.sum(weight))
    return first * unconnected**2


def _monte_carlo_chunk(n, m, q, trials, seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    starved = 0
    for _ in range(trials):
        i, j = sample_pairs(n, m, rng)
        e = rng.integers(m)
        v, u = i[e], j[e]
        labeled = np.zeros(n, dtype=bool)
        labeled[rng.choice(n, q, replace=False)] = True
        if labeled[v] or labeled[u]:
            continue
        touching = (i == v) | (j == v) | (i == u) | (j == u)
        other = np.where((i == v) | (i == u), j, i)[touching]
        if not labeled[other].any():
            starved += 1
    return starved


def starved_prob_monte_carlo(n, m, q, trials, rng=None, chunks=None, workers=1):
    """Fraction of starved edges over sampled (G(n,m), label set, edge) triples and its binomial
    standard error"""
    if trials < 1:
        raise AnalysisError(f"trials must be >= 1, got {trials}")
    if not 1 <= m <= pair_count(n):
        raise AnalysisError(f"m must lie in [1, C(n,2)], got {m}")
    if not 0 <= q <= n:
        raise AnalysisError(f"q must lie in [0, n], got {q}")
    if q == 0:
        return 1.0, 0.0

    rng = rng_from(0 if rng is None else rng)
    chunks = chunks or max(1, workers)
    seeds = np.random.SeedSequence(int(rng.integers(2**63))).spawn(chunks)
    sizes = [trials // chunks + (1 if c < trials % chunks else 0) for c in range(chunks)]
    args = [(n, m, q, size, seed) for size, seed in zip(sizes, seeds) if size > 0]

    if workers > 1:
        from .mp_runs import map_ordered  # pylint: disable=import-outside-toplevel

        counts = map_ordered(_monte_carlo_chunk, args, workers)
    else:
        counts = [_monte_carlo_chunk(*a) for a in args]

    p = sum(counts) / trials
    return p, float(np.sqrt(p * (1 - p) / trials))


def count_starved_edges(A, labeled):
    """Fraction of edges whose endpoints are unlabeled and have no labeled neighbour"""
    g = _graph(A)
    u, v = _edge_arrays(g)
    if len(u) == 0:
        raise AnalysisError("the graph has no edges")
    lab = _labeled_mask(g.n, labeled)
    near = np.zeros(g.n, dtype=bool)
    near[u[lab[v]]] = True
    near[v[lab[u]]] = True
    starved = ~lab[u] & ~lab[v] & ~near[u] & ~near[v]
    return float(np.mean(starved))


def starved_node_groups(A, labeled, nodes):
    """Split `nodes` into those with and those without a labeled neighbour"""
    g = _graph(A)
    u, v = _edge_arrays(g)
    lab = _labeled_mask(g.n, labeled)
    near = np.zeros(g.n, dtype=bool)
    near[u[lab[v]]] = True
    near[v[lab[u]]] = True
    nodes = np.asarray(nodes, dtype=np.int64)
    return nodes[near[nodes]], nodes[~near[nodes]]


#
# Homophily
#


@dataclass
class HomophilyProfile:
    edges: List[float]
    odds: List[Optional[float]]
    same: List[int]
    different: List[int]
    ratio: float

    def as_dict(self):
        return {"edges": self.edges, "odds": self.odds, "same": self.same, "different": self.different, "ratio": self.ratio}


def edge_homophily_ratio(A, y):
    u, v = _edge_arrays(A)
    if len(u) == 0:
        raise AnalysisError("the graph has no edges")
    y = np.asarray(y)
    return float(np.mean(y[u] == y[v]))


def homophily_odds(A, y, nodes, bins=None):
    """Same-label odds of node pairs from `nodes`, binned by their edge weight.

    Bin 0 holds the pairs of weight exactly 0, bin i the weights in (edges[i-1], edges[i]]; the
    last edge is the largest weight. Empty bins are None, bins without different-label pairs
    report ODDS_CAP.
    """
    g = _graph(A)
    nodes = np.asarray(nodes, dtype=np.int64)
    y = np.asarray(y)
    sub = g.csr[nodes][:, nodes].toarray()
    iu, ju = np.triu_indices(len(nodes), 1)
    weights = sub[iu, ju]
    same_label = y[nodes][iu] == y[nodes][ju]

    edges = list(DEFAULT_BINS if bins is None else bins)
    top = float(weights.max()) if len(weights) else 0.0
    if top > edges[-1]:
        edges.append(top)

    odds, same, different = [], [], []
    for b in range(len(edges)):
        if b == 0:
            in_bin = weights == edges[0]
        else:
            in_bin = (weights > edges[b - 1]) & (weights <= edges[b])
        s = int(np.sum(in_bin & same_label))
        d = int(np.sum(in_bin & ~same_label))
        same.append(s)
        different.append(d)
        if s + d == 0:
            odds.append(None)
        elif d == 0:
            odds.append(ODDS_CAP)
        else:
            odds.append(s / d)

    try:
        ratio = edge_homophily_ratio(g, y)
    except AnalysisError:
        ratio = float("nan")
    return HomophilyProfile(edges, odds, same, different, ratio)


#
# Noisy graphs
#


def perturb_graph(A, rho, rng=None):
    """Replace rho% of the edges by uniformly chosen new, non-self edges"""
    if not 0 <= rho <= 100:
        raise AnalysisError(f"rho must be a percentage, got {rho}")
    g = _graph(A)
    rng = rng_from(0 if rng is None else rng)
    u, v = _edge_arrays(g)
    m = len(u)
    count = int(np.floor(rho * m / 100.0 + 0.5))
    if count == 0:
        return SparseGraph.from_edges(g.n, zip(u.tolist(), v.tolist()))

    original = encode_pairs(u, v, g.n)
    total = pair_count(g.n)
    if total - m < count:
        raise AnalysisError(f"only {total - m} non-edges available to add {count} edges")

    drop = rng.choice(m, count, replace=False)
    kept = np.delete(original, drop)
    added = _sample_non_edges(total, original, count, rng)

    i, j = decode_pairs(np.concatenate([kept, added]), g.n)
    return SparseGraph.from_edges(g.n, zip(i.tolist(), j.tolist()))


def _sample_non_edges(total, existing, count, rng):
    existing = np.sort(existing)
    if total <= 2_000_000:
        free = np.setdiff1d(np.arange(total, dtype=np.int64), existing, assume_unique=True)
        return rng.choice(free, count, replace=False)
    chosen = []
    seen = set(existing.tolist())
    while len(chosen) < count:
        for pid in rng.integers(total, size=2 * (count - len(chosen))).tolist():
            if pid not in seen:
                seen.add(pid)
                chosen.append(pid)
                if len(chosen) == count:
                    break
    return np.array(chosen, dtype=np.int64)


def learned_support(A, threshold=SUPPORT_FRACTION, relative=True):
    """Undirected support of a learned graph.

    With `relative`, entry (i, j) counts when its weight is at least `threshold` times the largest
    off-diagonal weight of row i; otherwise when its weight exceeds `threshold`. A pair is in the
    support when either direction counts.
    """
    graph = _graph(A)
    if not relative:
        return graph.edge_set(threshold)
    off = graph.rows != graph.cols
    rows, cols, weights = graph.rows[off], graph.cols[off], graph.weights[off]
    row_max = np.zeros(graph.n)
    np.maximum.at(row_max, rows, weights)
    keep = (weights > 0) & (weights >= threshold * row_max[rows])
    lo, hi = np.minimum(rows[keep], cols[keep]), np.maximum(rows[keep], cols[keep])
    return set(zip(lo.tolist(), hi.tolist()))


def recovery_metrics(A_orig, A_noisy, A_learned, threshold=SUPPORT_FRACTION, relative=True):
    """(fraction of injected edges absent from the learned support,
    fraction of deleted original edges present in it); nan where nothing was injected/deleted"""
    original = _graph(A_orig).edge_set()
    noisy = _graph(A_noisy).edge_set()
    support = learned_support(A_learned, threshold, relative)

    injected = noisy - original
    deleted = original - noisy
    removed = len(injected - support) / len(injected) if injected else float("nan")
    recovered = len(deleted & support) / len(deleted) if deleted else float("nan")
    return RecoveryMetrics(removed, recovered)
