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

"""Training loops: joint graph + classifier learning, its baselines and variants"""

import itertools
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .adjacency import apply_p, normalize, process, symmetrize, adjacency_dropout
from .datasets import Dataset
from .defaults import TUNING_GRID, ConfigError, create_config, noise_args, validate
from .defaults import classifier_args, dae_args, generator_args, processor_args
from .defaults import get_default
from .generators import generate, init_generator, knn_graph
from .graph_analysis import starved_node_groups
from .models import (
    ClassifierParams,
    DaeParams,
    classifier_forward,
    combined_loss,
    dae_forward,
    dae_hidden,
    dae_loss,
    loss_value,
    sample_noise,
)
from .numerics import (
    Adam,
    EmptyIndexError,
    SparseGraph,
    SparseNode,
    backward,
    finite_diff_check,
    softmax,
    softmax_cross_entropy,
    value_of,
)
from .progress import progress_bar
from .random_graphs import rng_from
from .utils import Timer, debug, info, mean_std, warn

STREAMS = ("classifier", "dae", "generator", "noise", "dropout_c", "dropout_dae", "adj_c", "adj_dae")


class TrainingDivergedError(RuntimeError):
    pass


def make_streams(seed):
    """Independent named PCG64 streams of one run"""
    children = np.random.SeedSequence(seed).spawn(len(STREAMS))
    return {name: np.random.Generator(np.random.PCG64(s)) for name, s in zip(STREAMS, children)}


@dataclass
class EpochRecord:
    epoch: int
    loss_c: float
    loss_dae: float
    val_accuracy: Optional[float] = None
    val_loss: Optional[float] = None


@dataclass
class TrainReport:
    experiment: str
    seed: int
    history: List[EpochRecord]
    best_epoch: int
    val_accuracy: float
    val_loss: float
    test_accuracy: Optional[float] = None
    wall_time: float = field(default=0.0, compare=False)
    probabilities: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    adjacency: Optional[SparseGraph] = field(default=None, repr=False, compare=False)
    notes: dict = field(default_factory=dict)

    def metrics(self):
        result = {"test_accuracy": self.test_accuracy, "val_accuracy": self.val_accuracy, "best_epoch": self.best_epoch}
        result.update({k: v for k, v in self.notes.items() if isinstance(v, (int, float))})
        return result


def evaluate(logits, y, index):
    """Accuracy of argmax(logits) on the rows in index (ties go to the lowest class)"""
    index = np.asarray(index, dtype=np.int64)
    if len(index) == 0:
        raise EmptyIndexError("accuracy is undefined on an empty node set")
    pred = np.argmax(np.asarray(value_of(logits))[index], axis=1)
    return float(np.mean(pred == np.asarray(y)[index]))


def _as_graph(A):
    if isinstance(A, SparseGraph):
        return A
    if isinstance(A, SparseNode):
        return A.to_graph()
    return SparseGraph.from_dense(np.asarray(value_of(A)))


def _check_finite(epoch, loss_c, loss_dae):
    if not (np.isfinite(loss_c) and np.isfinite(loss_dae)):
        raise TrainingDivergedError(f"non-finite loss at epoch {epoch}: L_C={loss_c}, L_DAE={loss_dae}")


class Selector:
    """Best-validation checkpointing with optional patience"""

    def __init__(self, select_by="accuracy", patience=None):
        self.select_by = select_by
        self.patience = patience
        self.best_epoch = 0
        self.best_accuracy = -np.inf
        self.best_loss = np.inf
        self.state = None
        self.stale = 0

    def better(self, accuracy, loss):
        if self.select_by == "loss":
            return loss < self.best_loss
        return accuracy > self.best_accuracy

    def offer(self, epoch, accuracy, loss, snapshot):
        if self.better(accuracy, loss):
            self.best_epoch, self.best_accuracy, self.best_loss = epoch, accuracy, loss
            self.state = snapshot()
            self.stale = 0
            return True
        self.stale += 1
        return False

    @property
    def exhausted(self):
        return self.patience is not None and self.stale >= self.patience


def selection(config, dataset):
    """Validation criterion for checkpoints and model selection: the config's, else the dataset's"""
    return config.select_by or dataset.select_by


def _report_better(a, b, select_by):
    if select_by == "loss":
        return a.val_loss < b.val_loss
    return a.val_accuracy > b.val_accuracy


def finalize(report, dataset):
    """Read the test accuracy, once, from the restored best checkpoint"""
    report.test_accuracy = evaluate(report.probabilities, dataset.y, dataset.test)
    info(f"{report.experiment} seed {report.seed}: test accuracy {report.test_accuracy:.4f} (epoch {report.best_epoch})")
    return report


#
# Joint training
#


class SlapsModel:
    """Generator, GNN_C and GNN_DAE of one run, wired through the adjacency processor"""

    def __init__(self, dataset, config, streams):
        self.dataset = dataset
        self.config = config
        self.streams = streams
        self.noise_scheme = noise_args(config, dataset.feature_kind)["scheme"]

        self.generator = init_generator(
            dataset.X,
            initial_graph=dataset.graph,
            reuse_mask=config.mask_refresh == "epoch",
            **generator_args(config),
        )
        if not config.train_generator:
            for p in self.generator.parameters():
                p.requires_grad = False

        c_args, d_args = classifier_args(config), dae_args(config)
        self.classifier = ClassifierParams.init(
            dataset.f, c_args["hidden"], dataset.num_classes, streams["classifier"], c_args["layers"]
        )
        self.dae = DaeParams.init(dataset.f, dae_hidden(dataset.f, d_args["hidden"]), streams["dae"])

    def parameters(self):
        return self.generator.parameters() + self.classifier.parameters() + self.dae.parameters()

    def snapshot(self):
        return (self.generator.snapshot(), self.classifier.snapshot(), self.dae.snapshot())

    def restore(self, state):
        self.generator.restore(state[0])
        self.classifier.restore(state[1])
        self.dae.restore(state[2])

    def sample_noise(self):
        c = self.config
        return sample_noise(self.dataset.X, self.noise_scheme, c.r, c.eta, c.sigma, self.streams["noise"])

    def forward(self, training, noise=None, mask=None, classify=True):
        """(logits, X_hat, A); X_hat is None without noise, logits None with classify=False"""
        c, s = self.config, self.streams
        raw = generate(self.generator, self.dataset.X, mask)
        pre = symmetrize(apply_p(raw, c.resolved_p_kind), c.sym_mode)

        if c.adj_dropout_position == "before" and training:
            A_c = normalize(adjacency_dropout(pre, c.dropout_c, s["adj_c"]), c.norm_mode, c.add_self_loops)
            A_d = normalize(adjacency_dropout(pre, c.dropout_dae, s["adj_dae"]), c.norm_mode, c.add_self_loops)
            drop_c = drop_d = 0.0
        else:
            A_c = A_d = normalize(pre, c.norm_mode, c.add_self_loops)
            drop_c, drop_d = c.dropout_c, c.dropout_dae

        logits = None
        if classify:
            logits = classifier_forward(
                A_c, self.dataset.X, self.classifier, training, c.dropout_hidden, drop_c, s["dropout_c"], s["adj_c"]
            )
        X_hat = None
        if noise is not None:
            X_hat = dae_forward(
                A_d, noise.noisy_X, self.dae, training, c.dropout_hidden, drop_d, s["dropout_dae"], s["adj_dae"]
            )
        return logits, X_hat, A_c

    def loss(self, logits, X_hat, noise):
        loss_c = softmax_cross_entropy(logits, self.dataset.y, self.dataset.train)
        loss_dae = None if X_hat is None else dae_loss(self.dataset.X, X_hat, noise, self.noise_scheme)
        return loss_c, loss_dae

    def validation(self):
        logits, _, A = self.forward(False)
        d = self.dataset
        return (
            evaluate(logits, d.y, d.val),
            loss_value(softmax_cross_entropy(value_of(logits), d.y, d.val)),
            logits,
            A,
        )


def train_slaps(dataset, config=None, finalize_report=True, experiment="slaps"):
    """Minimize L = L_C + lam * L_DAE over generator, classifier and denoiser jointly"""
    config = create_config() if config is None else validate(config)
    streams = make_streams(config.seed)
    model = SlapsModel(dataset, config, streams)

    opt_c = Adam(model.classifier.parameters(), config.lr_c, weight_decay=config.weight_decay)
    other = model.dae.parameters()
    if config.train_generator:
        other = model.generator.parameters() + other
    opt_g = Adam(other, config.lr_dae, weight_decay=config.weight_decay)

    selector = Selector(selection(config, dataset), config.patience)
    history = []
    bar = progress_bar(get_default("progress"), config.max_epochs)
    with Timer(get_default("timeit"), dataset.name, experiment) as timer:
        for epoch in range(1, config.max_epochs + 1):
            model.generator.begin_epoch()
            noise = model.sample_noise() if config.lam > 0 else None
            if noise is not None and noise.size == 0:
                noise = None

            logits, X_hat, _ = model.forward(True, noise)
            loss_c, loss_dae = model.loss(logits, X_hat, noise)
            loss = combined_loss(loss_c, loss_dae, config.lam)
            lc = loss_value(loss_c)
            ld = 0.0 if loss_dae is None else loss_value(loss_dae)
            _check_finite(epoch, lc, ld)

            opt_c.zero_grad()
            opt_g.zero_grad()
            backward(loss)
            opt_c.step()
            opt_g.step()

            record = EpochRecord(epoch, lc, ld)
            if epoch % config.eval_every == 0 or epoch == config.max_epochs:
                record.val_accuracy, record.val_loss, _, _ = model.validation()
                selector.offer(epoch, record.val_accuracy, record.val_loss, model.snapshot)
                debug(f"epoch {epoch}: L_C={lc:.5f} L_DAE={ld:.5f} val={record.val_accuracy:.4f}")
            history.append(record)
            bar.update(1, f"L_C={lc:.4f}")
            if selector.exhausted:
                info(f"no improvement for {config.patience} checks, stopping at epoch {epoch}")
                break
        bar.done()

        model.restore(selector.state)
        model.generator.begin_epoch()
        val_acc, val_loss, logits, A = model.validation()

    report = TrainReport(
        experiment,
        config.seed,
        history,
        selector.best_epoch,
        val_acc,
        val_loss,
        wall_time=timer.elapsed,
        probabilities=softmax(np.asarray(value_of(logits))),
        adjacency=_as_graph(A),
        notes={"select_by": selector.select_by},
    )
    return finalize(report, dataset) if finalize_report else report


#
# Fixed graphs
#


def fit_classifier(dataset, adjacency, config, epochs=None, streams=None, experiment="fixed-graph"):
    """Train a fresh GNN_C on a fixed processed adjacency (None = no graph, an MLP)"""
    epochs = config.fixed_graph_epochs if epochs is None else epochs
    streams = make_streams(config.seed) if streams is None else streams
    X, y = dataset.X, dataset.y

    c_args = classifier_args(config)
    params = ClassifierParams.init(dataset.f, c_args["hidden"], dataset.num_classes, streams["classifier"], c_args["layers"])
    opt = Adam(params.parameters(), config.lr_c, weight_decay=config.weight_decay)
    selector = Selector(selection(config, dataset), config.patience)
    history = []

    def forward(training):
        return classifier_forward(
            adjacency, X, params, training, c_args["dropout"], config.dropout_c, streams["dropout_c"], streams["adj_c"]
        )

    with Timer(get_default("timeit"), dataset.name, experiment, 1) as timer:
        for epoch in range(1, epochs + 1):
            loss = softmax_cross_entropy(forward(True), y, dataset.train)
            lc = loss_value(loss)
            _check_finite(epoch, lc, 0.0)
            opt.zero_grad()
            backward(loss)
            opt.step()

            record = EpochRecord(epoch, lc, 0.0)
            if epoch % config.eval_every == 0 or epoch == epochs:
                logits = value_of(forward(False))
                record.val_accuracy = evaluate(logits, y, dataset.val)
                record.val_loss = loss_value(softmax_cross_entropy(logits, y, dataset.val))
                selector.offer(epoch, record.val_accuracy, record.val_loss, params.snapshot)
            history.append(record)
            if selector.exhausted:
                break

        params.restore(selector.state)
        logits = value_of(forward(False))

    return TrainReport(
        experiment,
        config.seed,
        history,
        selector.best_epoch,
        evaluate(logits, y, dataset.val),
        loss_value(softmax_cross_entropy(logits, y, dataset.val)),
        wall_time=timer.elapsed,
        probabilities=softmax(logits),
        adjacency=None if adjacency is None else _as_graph(adjacency),
        notes={"select_by": selector.select_by},
    )


def train_fixed_graph(dataset, adjacency, config=None, epochs=None, finalize_report=True):
    config = create_config() if config is None else validate(config)
    report = fit_classifier(dataset, adjacency, config, epochs)
    return finalize(report, dataset) if finalize_report else report


def fixed_graph_args(config):
    # fixed graphs are non-negative, P is the identity on them
    return {**processor_args(config), "p_kind": "relu"}


def knn_adjacency(dataset, config):
    """Processed kNN graph of the features, or of the dataset's own graph when it has one"""
    base = dataset.graph if dataset.graph is not None else knn_graph(dataset.X, config.k)
    return process(base, **fixed_graph_args(config))


def train_knn_gcn(dataset, config=None, finalize_report=True):
    config = create_config() if config is None else validate(config)
    report = fit_classifier(dataset, knn_adjacency(dataset, config), config, experiment="knn-gcn")
    return finalize(report, dataset) if finalize_report else report


def train_mlp(dataset, config=None, finalize_report=True):
    config = create_config() if config is None else validate(config)
    report = fit_classifier(dataset, None, config, experiment="mlp")
    return finalize(report, dataset) if finalize_report else report


#
# Variants
#


def train_two_stage(dataset, config=None, t=None, finalize_report=True):
    """Learn the graph from L_DAE alone; every t epochs train a classifier on the frozen graph"""
    config = create_config() if config is None else validate(config)
    t = config.two_stage_t if t is None else t
    if t < 1:
        raise ConfigError(f"t must be >= 1, got {t}")
    streams = make_streams(config.seed)
    model = SlapsModel(dataset, config, streams)
    params = model.dae.parameters()
    if config.train_generator:
        params = model.generator.parameters() + params
    opt = Adam(params, config.lr_dae, weight_decay=config.weight_decay)

    best, history, snapshots = None, [], []
    with Timer(get_default("timeit"), dataset.name, "two-stage") as timer:
        for epoch in range(1, config.max_epochs + 1):
            model.generator.begin_epoch()
            noise = model.sample_noise()
            if noise.size == 0:
                raise ConfigError("two-stage training needs a nonzero noise percentage r")
            _, X_hat, _ = model.forward(True, noise, classify=False)
            loss = dae_loss(dataset.X, X_hat, noise, model.noise_scheme)
            ld = loss_value(loss)
            _check_finite(epoch, 0.0, ld)
            opt.zero_grad()
            backward(loss)
            opt.step()
            record = EpochRecord(epoch, 0.0, ld)

            if epoch % t == 0 or (epoch == config.max_epochs and not snapshots):
                _, _, A = model.forward(False, classify=False)
                fixed = _as_graph(A)
                candidate = fit_classifier(dataset, fixed, config, experiment="two-stage")
                candidate.notes["snapshot_epoch"] = epoch
                snapshots.append(epoch)
                record.val_accuracy, record.val_loss = candidate.val_accuracy, candidate.val_loss
                if best is None or _report_better(candidate, best, selection(config, dataset)):
                    best = candidate
            history.append(record)

    best.history = history
    best.notes["snapshots"] = len(snapshots)
    best.wall_time = timer.elapsed
    return finalize(best, dataset) if finalize_report else best


def pseudo_labels(probabilities, eligible, zeta):
    """Top-zeta eligible nodes by confidence (ties to the lower index) and their predicted classes"""
    eligible = np.asarray(eligible, dtype=np.int64)
    conf = probabilities[eligible].max(axis=1)
    order = np.lexsort((eligible, -conf))
    chosen = eligible[order[:zeta]]
    return chosen, probabilities[chosen].argmax(axis=1)


def self_training(dataset, config=None, zeta=None, finalize_report=True):
    """Train, add the zeta most confident predictions on unlabeled nodes as labels, retrain"""
    config = create_config() if config is None else validate(config)
    zeta = config.zeta if zeta is None else zeta
    first = train_slaps(dataset, config, finalize_report=False, experiment="self-training")
    if zeta == 0:
        return finalize(first, dataset) if finalize_report else first

    eligible = dataset.unlabeled
    if len(eligible) < zeta:
        warn(f"only {len(eligible)} unlabeled nodes for {zeta} pseudo-labels, using all of them")
    chosen, labels = pseudo_labels(first.probabilities, eligible, zeta)
    y = dataset.y.copy()
    y[chosen] = labels
    augmented = dataset.with_training(np.sort(np.concatenate([dataset.train, chosen])), y)

    report = train_slaps(augmented, config, finalize_report=False, experiment="self-training")
    report.notes["pseudo_labels"] = len(chosen)
    report.notes["pseudo_label_accuracy"] = float(np.mean(labels == dataset.y[chosen])) if len(chosen) else 0.0
    return finalize(report, dataset) if finalize_report else report


def ada_edge_edit(graph, probabilities, threshold):
    """Add edges between confident nodes with equal predictions, remove edges between confident
    nodes with different predictions. Returns (graph, added, removed)."""
    conf = probabilities.max(axis=1)
    pred = probabilities.argmax(axis=1)
    confident = conf > threshold

    edges = graph.edge_set()
    removed = {(u, v) for u, v in edges if confident[u] and confident[v] and pred[u] != pred[v]}
    added = set()
    for c in np.unique(pred[confident]):
        group = np.flatnonzero(confident & (pred == c))
        added.update((int(u), int(v)) for u, v in itertools.combinations(group, 2))
    added -= edges

    result = SparseGraph.from_edges(graph.n, (edges - removed) | added)
    return result, len(added), len(removed)


def ada_edge(dataset, config=None, conf_threshold=None, finalize_report=True):
    """Alternate structure edits and retraining while the validation metric improves"""
    config = create_config() if config is None else validate(config)
    threshold = config.ada_threshold if conf_threshold is None else conf_threshold

    best = train_slaps(dataset, config, finalize_report=False, experiment="ada-edge")
    graph = SparseGraph.from_edges(dataset.n, best.adjacency.edge_set())
    rounds, total_added, total_removed = 1, 0, 0
    for _ in range(config.ada_rounds):
        edited, added, removed = ada_edge_edit(graph, best.probabilities, threshold)
        if added == 0 and removed == 0:
            break
        A = process(edited, **fixed_graph_args(config))
        candidate = fit_classifier(dataset, A, config, experiment="ada-edge")
        debug(f"AdaEdge round {rounds}: +{added} -{removed} edges, val {candidate.val_accuracy:.4f}")
        if not _report_better(candidate, best, selection(config, dataset)):
            break
        best, graph = candidate, edited
        rounds += 1
        total_added += added
        total_removed += removed

    best.notes.update(rounds=rounds, edges_added=total_added, edges_removed=total_removed)
    return finalize(best, dataset) if finalize_report else best


#
# Experiments
#

OPERATIONS = {
    "slaps": train_slaps,
    "two-stage": train_two_stage,
    "self-train": self_training,
    "ada-edge": ada_edge,
    "knn-gcn": train_knn_gcn,
    "mlp": train_mlp,
}


def grid_search(dataset, base=None, grid=None, operation="slaps"):
    """Exhaustive product over the grid, selected on validation; returns (config, report, all results)"""
    base = create_config() if base is None else base
    grid = {k: v for k, v in TUNING_GRID.items() if k != "zeta"} if grid is None else grid
    train = OPERATIONS[operation]
    keys = sorted(grid)

    results, best = [], None
    for combo in itertools.product(*(grid[k] for k in keys)):
        config = validate(base.replace(**dict(zip(keys, combo))), grid=True)
        report = train(dataset, config, finalize_report=False)
        results.append((config, report))
        if best is None or _report_better(report, best[1], selection(config, dataset)):
            best = (config, report)
    info(f"grid search over {len(results)} configurations done")
    return best[0], finalize(best[1], dataset), results


def dataset_for(dataset, seed):
    """`dataset` itself, or the dataset a factory `dataset(seed)` builds for this seed"""
    return dataset(seed) if callable(dataset) else dataset


def run_seeds(operation, dataset, config, seeds):
    """Same experiment over several seeds, sequentially"""
    train = OPERATIONS[operation]
    return [train(dataset_for(dataset, s), config.replace(seed=int(s))) for s in seeds]


def summarize(reports):
    mean, std = mean_std([r.test_accuracy for r in reports])
    return {"mean": mean, "std": std, "runs": len(reports)}


def group_accuracy(report, dataset, graph=None):
    """Test accuracy of nodes with and without a labeled neighbour in `graph`"""
    graph = report.adjacency if graph is None else graph
    with_label, without_label = starved_node_groups(graph, dataset.train, dataset.test)
    result = {}
    for name, nodes in (("with_labeled_neighbour", with_label), ("without_labeled_neighbour", without_label)):
        result[name] = evaluate(report.probabilities, dataset.y, nodes) if len(nodes) else float("nan")
        result[f"{name}_count"] = len(nodes)
    return result


#
# Gradient check
#


def gradient_check(seed=0, generator="mlp", n=12, f=6, classes=3):
    """Largest relative finite-difference error of the full joint loss on a small random instance"""
    rng = rng_from(seed)
    X = (rng.random((n, f)) < 0.4).astype(np.float64)
    X[np.arange(n), rng.integers(f, size=n)] = 1.0
    y = np.arange(n) % classes
    dataset = Dataset(X, y, np.arange(6), np.arange(6, 9), np.arange(9, n), name="gradcheck")
    config = create_config(
        generator=generator,
        k=3,
        hidden_c=8,
        hidden_dae=8,
        dropout_hidden=0.0,
        dropout_c=0.0,
        dropout_dae=0.0,
        lam=1.0,
        r=20.0,
        eta=2.0,
        seed=seed,
    )

    streams = make_streams(seed)
    model = SlapsModel(dataset, config, streams)
    # move off the identity initialisation and its kinks
    for p in model.generator.parameters():
        p.value += 0.1 * streams["generator"].standard_normal(p.shape)
    noise = model.sample_noise()
    model.forward(False, noise)
    mask = model.generator.last_mask

    def loss():
        logits, X_hat, _ = model.forward(False, noise, mask=mask)
        loss_c, loss_dae = model.loss(logits, X_hat, noise)
        return combined_loss(loss_c, loss_dae, config.lam)

    return finite_diff_check(loss, model.parameters())
