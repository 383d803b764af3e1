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

import dataclasses
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np
from sklearn.datasets import load_breast_cancer, load_digits, load_wine
from sklearn.model_selection import train_test_split

from .numerics import SparseGraph
from .random_graphs import rng_from
from .utils import info

FEATURE_KINDS = ("binary", "continuous")
SPLITS = ("train", "val", "test")

# loader, label rate of the dataset statistics table, validation criterion
BUILTIN = {
    "wine": (load_wine, 0.112, "loss"),
    "cancer": (load_breast_cancer, 0.035, "loss"),
    "digits": (load_digits, 0.056, "accuracy"),
}
SELECT_BY = ("accuracy", "loss")


class DatasetError(ValueError):
    pass


def _index(values, name, n):
    idx = np.asarray(values, dtype=np.int64).ravel()
    if len(idx) and (idx.min() < 0 or idx.max() >= n):
        bad = idx[(idx < 0) | (idx >= n)][0]
        raise DatasetError(f"{name} index {bad} is out of range for {n} nodes")
    if len(np.unique(idx)) != len(idx):
        raise DatasetError(f"{name} contains duplicate node indices")
    return idx


@dataclass(eq=False)
class Dataset:
    """Node features X, labels y (-1 = unknown) and disjoint train / val / test node sets"""

    X: np.ndarray
    y: np.ndarray
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray
    graph: Optional[SparseGraph] = None
    feature_kind: str = "binary"
    name: str = "dataset"
    reference_graph: Optional[SparseGraph] = None
    select_by: str = "accuracy"

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        if self.X.ndim != 2:
            raise DatasetError(f"features must be a matrix, got shape {self.X.shape}")
        n = self.X.shape[0]
        self.y = np.asarray(self.y, dtype=np.int64).ravel()
        if len(self.y) != n:
            raise DatasetError(f"{len(self.y)} labels for {n} feature rows")
        if self.feature_kind not in FEATURE_KINDS:
            raise DatasetError(f"feature kind must be one of {FEATURE_KINDS}, got '{self.feature_kind}'")
        if self.select_by not in SELECT_BY:
            raise DatasetError(f"select_by must be one of {SELECT_BY}, got '{self.select_by}'")

        self.train = _index(self.train, "train", n)
        self.val = _index(self.val, "val", n)
        self.test = _index(self.test, "test", n)
        for (a, name_a), (b, name_b) in (
            ((self.train, "train"), (self.val, "val")),
            ((self.train, "train"), (self.test, "test")),
            ((self.val, "val"), (self.test, "test")),
        ):
            common = np.intersect1d(a, b)
            if len(common) > 0:
                raise DatasetError(f"node {common[0]} is in both the {name_a} and the {name_b} split")

        labeled = np.concatenate([self.train, self.val, self.test])
        missing = labeled[self.y[labeled] < 0]
        if len(missing) > 0:
            raise DatasetError(f"node {missing[0]} belongs to a split but has no label")
        for g in (self.graph, self.reference_graph):
            if g is not None and g.n != n:
                raise DatasetError(f"graph has {g.n} nodes, the features {n}")

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def f(self):
        return self.X.shape[1]

    @property
    def num_classes(self):
        return int(self.y.max()) + 1

    @property
    def label_rate(self):
        return len(self.train) / self.n

    @property
    def unlabeled(self):
        """Nodes outside all three splits"""
        mask = np.ones(self.n, dtype=bool)
        mask[np.concatenate([self.train, self.val, self.test])] = False
        return np.flatnonzero(mask)

    def with_training(self, train, y=None):
        return dataclasses.replace(self, train=np.asarray(train), y=self.y if y is None else y)

    def with_graph(self, graph):
        return dataclasses.replace(self, graph=graph)


def standardize(X):
    """Zero mean and unit variance per feature; constant features are only centered"""
    X = np.asarray(X, dtype=np.float64)
    std = X.std(axis=0)
    return (X - X.mean(axis=0)) / np.where(std > 0, std, 1.0)


#
# Manifests
#


@dataclass
class DatasetManifest:
    name: str
    features: str
    labels: str
    splits: str
    edges: Optional[str] = None
    feature_kind: str = "binary"
    delimiter: Optional[str] = None
    standardize: Optional[bool] = None
    select_by: str = "accuracy"
    root: Optional[str] = None

    def path(self, filename):
        if filename is None or os.path.isabs(filename):
            return filename
        root = os.environ.get("LGL_DATA_DIR") or self.root or "."
        return os.path.join(root, filename)


MANIFEST_KEYS = {f.name for f in dataclasses.fields(DatasetManifest)} - {"root"}


def manifest_from_dict(values, root=None):
    unknown = set(values) - MANIFEST_KEYS
    if unknown:
        raise DatasetError(f"unknown manifest key(s): {', '.join(sorted(unknown))}")
    for key in ("name", "features", "labels", "splits"):
        if key not in values:
            raise DatasetError(f"manifest misses the '{key}' entry")
    values = dict(values)
    if "standardize" in values:
        text = str(values["standardize"]).strip().lower()
        values["standardize"] = None if text in ("", "none") else text in ("1", "true", "yes")
    for key in ("edges", "delimiter"):
        if str(values.get(key, "")).strip().lower() in ("", "none"):
            values[key] = None
    return DatasetManifest(root=root, **values)


def _read_lines(path):
    if not os.path.exists(path):
        raise DatasetError(f"file '{path}' does not exist")
    with open(path, "r", encoding="utf-8") as fd:
        return [(no, line.strip()) for no, line in enumerate(fd, 1) if line.strip() and not line.startswith("#")]


def _read_features(path, delimiter):
    rows = []
    for no, line in _read_lines(path):
        try:
            rows.append([float(v) for v in line.split(delimiter)])
        except ValueError as ex:
            raise DatasetError(f"{path}:{no}: {ex}") from ex
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise DatasetError(f"{path}: feature rows differ in length {sorted(widths)}")
    return np.array(rows, dtype=np.float64).reshape(len(rows), -1)


def _read_labels(path):
    labels = []
    for no, line in _read_lines(path):
        try:
            labels.append(int(line))
        except ValueError as ex:
            raise DatasetError(f"{path}:{no}: non-integer label '{line}'") from ex
    return np.array(labels, dtype=np.int64)


def _read_splits(path, n):
    assigned = {}
    for no, line in _read_lines(path):
        parts = line.split()
        if len(parts) != 2 or parts[1] not in SPLITS:
            raise DatasetError(f"{path}:{no}: expected '<node> train|val|test', got '{line}'")
        node = int(parts[0])
        if node in assigned and assigned[node] != parts[1]:
            raise DatasetError(f"node {node} is in both the {assigned[node]} and the {parts[1]} split")
        assigned[node] = parts[1]
    if any(not 0 <= node < n for node in assigned):
        raise DatasetError(f"{path}: split node index out of range for {n} nodes")
    return {s: np.array(sorted(v for v, t in assigned.items() if t == s), dtype=np.int64) for s in SPLITS}


def _read_edges(path, n):
    rows, cols, weights = [], [], []
    for no, line in _read_lines(path):
        parts = line.split()
        if len(parts) not in (2, 3):
            raise DatasetError(f"{path}:{no}: expected 'src dst [weight]', got '{line}'")
        rows.append(int(parts[0]))
        cols.append(int(parts[1]))
        weights.append(float(parts[2]) if len(parts) == 3 else 1.0)
    try:
        return SparseGraph(n, rows, cols, weights)
    except ValueError as ex:
        raise DatasetError(f"{path}: {ex}") from ex


def load_dataset(manifest):
    """Dataset from a manifest (or the path of a manifest file)"""
    if isinstance(manifest, str):
        from .serialize import read_manifest  # pylint: disable=import-outside-toplevel

        manifest = read_manifest(manifest)

    X = _read_features(manifest.path(manifest.features), manifest.delimiter)
    y = _read_labels(manifest.path(manifest.labels))
    if len(y) != X.shape[0]:
        raise DatasetError(f"{X.shape[0]} feature rows but {len(y)} labels")
    splits = _read_splits(manifest.path(manifest.splits), X.shape[0])
    graph = _read_edges(manifest.path(manifest.edges), X.shape[0]) if manifest.edges else None

    do_standardize = manifest.standardize
    if do_standardize is None:
        do_standardize = manifest.feature_kind == "continuous"
    if do_standardize:
        X = standardize(X)

    dataset = Dataset(
        X, y, graph=graph, feature_kind=manifest.feature_kind, name=manifest.name, select_by=manifest.select_by, **splits
    )
    info(f"loaded {dataset.name}: n={dataset.n}, f={dataset.f}, classes={dataset.num_classes}")
    return dataset


#
# Bundled scikit-learn datasets
#


def load_builtin(name, seed=0):
    """Wine, Cancer or Digits with stratified splits regenerated from the seed"""
    if name not in BUILTIN:
        raise DatasetError(f"unknown dataset '{name}', choose one of {sorted(BUILTIN)}")
    loader, rate, select_by = BUILTIN[name]
    X, y = loader(return_X_y=True)
    n = len(y)
    size = int(round(rate * n))

    nodes = np.arange(n)
    train, rest = train_test_split(nodes, train_size=size, stratify=y, random_state=seed)
    val, test = train_test_split(rest, train_size=size, stratify=y[rest], random_state=seed)
    return Dataset(
        standardize(X),
        y,
        np.sort(train),
        np.sort(val),
        np.sort(test),
        feature_kind="continuous",
        name=name,
        select_by=select_by,
    )


#
# Planted synthetic data
#


def generate_planted(
    n=100,
    classes=2,
    f=20,
    intra_p=1.0,
    inter_p=0.0,
    label_per_class=5,
    seed=0,
    flip=0.35,
    val_per_class=10,
    test_fraction=0.5,
    p_in=0.1,
    p_out=0.01,
):
    """Binary features with one active block per class plus flip noise.

    A feature of the node's own block is on with probability intra_p, any other feature with
    inter_p, then every bit flips with probability `flip`. The planted-partition graph in
    `reference_graph` is never used as input by default.
    """
    if classes < 1 or f < classes:
        raise DatasetError(f"need f >= classes >= 1, got f={f}, classes={classes}")
    rng = rng_from(seed)

    y = rng.permutation(np.arange(n) % classes)
    block = np.arange(f) * classes // f
    p = np.where(block[None, :] == y[:, None], intra_p, inter_p)
    X = (rng.random((n, f)) < p).astype(np.float64)
    flips = rng.random((n, f)) < flip
    X = np.where(flips, 1.0 - X, X)

    train, val, test = [], [], []
    for c in range(classes):
        members = rng.permutation(np.flatnonzero(y == c))
        if len(members) < label_per_class + val_per_class:
            raise DatasetError(f"class {c} has {len(members)} nodes, too few for the requested splits")
        train.extend(members[:label_per_class])
        val.extend(members[label_per_class : label_per_class + val_per_class])
        rest = members[label_per_class + val_per_class :]
        test.extend(rest[: int(round(test_fraction * len(rest)))])

    iu, ju = np.triu_indices(n, 1)
    probs = np.where(y[iu] == y[ju], p_in, p_out)
    keep = rng.random(len(iu)) < probs
    reference = SparseGraph.from_edges(n, zip(iu[keep].tolist(), ju[keep].tolist()))

    return Dataset(
        X,
        y,
        np.sort(train),
        np.sort(val),
        np.sort(test),
        feature_kind="binary",
        name="planted",
        reference_graph=reference,
    )
