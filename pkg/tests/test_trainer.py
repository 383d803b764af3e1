import numpy as np
import pytest

from latent_graph.adjacency import process
from latent_graph.datasets import generate_planted, load_builtin
from latent_graph.defaults import ConfigError, create_config
from latent_graph.generators import knn_graph
from latent_graph.graph_analysis import edge_homophily_ratio, perturb_graph
from latent_graph.numerics import EmptyIndexError, SparseGraph
from latent_graph.trainer import (
    STREAMS,
    TrainingDivergedError,
    ada_edge,
    ada_edge_edit,
    evaluate,
    fit_classifier,
    gradient_check,
    grid_search,
    group_accuracy,
    make_streams,
    pseudo_labels,
    run_seeds,
    selection,
    self_training,
    summarize,
    train_knn_gcn,
    train_mlp,
    train_slaps,
    train_two_stage,
    _check_finite,
)

from testlib import small_dataset


def quick(**overrides):
    values = dict(k=5, hidden_c=16, hidden_dae=16, max_epochs=30, fixed_graph_epochs=30, lam=1.0, r=10.0, eta=2.0)
    values.update(overrides)
    return create_config(**values)


@pytest.fixture
def planted():
    return generate_planted(seed=0)


class TestEvaluate:
    def test_perfect(self):
        y = np.array([0, 2, 1])
        assert evaluate(np.eye(3)[y], y, [0, 1, 2]) == 1.0

    def test_ties_go_to_lowest_class(self):
        assert evaluate(np.zeros((4, 3)), np.array([0, 0, 1, 2]), [0, 1, 2, 3]) == 0.5

    def test_scalar_loop(self):
        rng = np.random.default_rng(0)
        logits, y = rng.normal(size=(100, 4)), rng.integers(4, size=100)
        index = rng.choice(100, 40, replace=False)
        expected = sum(int(max(range(4), key=lambda c: logits[i][c]) == y[i]) for i in index) / 40
        assert evaluate(logits, y, index) == expected

    def test_empty(self):
        with pytest.raises(EmptyIndexError):
            evaluate(np.zeros((2, 2)), np.zeros(2, dtype=int), [])


def test_streams_are_independent_and_reproducible():
    first, second = make_streams(3), make_streams(3)
    assert set(first) == set(STREAMS)
    assert first["noise"].random() == second["noise"].random()
    assert first["noise"].random() != first["dropout_c"].random()


def test_divergence_is_reported():
    with pytest.raises(TrainingDivergedError, match="epoch 7"):
        _check_finite(7, float("nan"), 0.0)


class TestSlaps:
    def test_deterministic(self, planted):
        config = quick(seed=4)
        a, b = train_slaps(planted, config), train_slaps(planted, config)
        assert a == b
        np.testing.assert_array_equal(a.probabilities, b.probabilities)

    def test_report(self, planted):
        report = train_slaps(planted, quick(eval_every=5))
        assert len(report.history) == 30
        assert report.best_epoch % 5 == 0
        assert 0.0 <= report.test_accuracy <= 1.0
        assert report.adjacency.n == planted.n
        assert report.history[0].loss_dae > 0.0
        checked = [h for h in report.history if h.val_accuracy is not None]
        assert report.val_accuracy == max(h.val_accuracy for h in checked)

    def test_checkpoint_is_restored(self, planted):
        report = train_slaps(planted, quick(max_epochs=40))
        best = report.history[report.best_epoch - 1]
        assert report.val_accuracy == best.val_accuracy

    def test_lambda_zero_has_no_dae_loss(self, planted):
        report = train_slaps(planted, quick(lam=0.0))
        assert all(h.loss_dae == 0.0 for h in report.history)

    @pytest.mark.parametrize("generator", ["fp", "mlp_d"])
    def test_other_generators(self, planted, generator):
        report = train_slaps(planted, quick(generator=generator, max_epochs=10))
        assert len(report.history) == 10

    def test_patience(self, planted):
        report = train_slaps(planted, quick(max_epochs=200, patience=3, lr_c=0.0, lr_dae=0.0))
        assert len(report.history) == 4

    def test_epoch_mask_and_before_dropout(self, planted):
        report = train_slaps(planted, quick(mask_refresh="epoch", adj_dropout_position="before", max_epochs=5))
        assert len(report.history) == 5

    def test_continuous_features(self):
        dataset = load_builtin("wine", seed=0)
        report = train_slaps(dataset, quick(max_epochs=5, noise="gaussian"))
        assert report.history[0].loss_dae > 0.0

    def test_reduces_to_fixed_graph_gcn(self, planted):
        config = quick(
            generator="fp",
            p_kind="relu",
            lam=0.0,
            train_generator=False,
            dropout_c=0.0,
            max_epochs=50,
            fixed_graph_epochs=50,
        )
        joint = train_slaps(planted, config)
        A = process(knn_graph(planted.X, config.k).to_dense(), "relu")
        fixed = fit_classifier(planted, A, config, epochs=config.max_epochs)
        assert len(joint.history) == len(fixed.history) == 50
        for a, b in zip(joint.history, fixed.history):
            assert abs(a.loss_c - b.loss_c) < 1e-10
            assert a.val_accuracy == b.val_accuracy


class TestBaselines:
    def test_knn_gcn_and_mlp(self, planted):
        for train in (train_knn_gcn, train_mlp):
            report = train(planted, quick())
            assert len(report.history) == 30
            assert report.test_accuracy is not None
        assert train_mlp(planted, quick()).adjacency is None

    def test_mlp_separable(self):
        dataset = generate_planted(flip=0.0, seed=1)
        report = train_mlp(dataset, quick(fixed_graph_epochs=200, dropout_hidden=0.0))
        assert report.test_accuracy == 1.0


class TestVariants:
    def test_two_stage_snapshots(self, planted):
        report = train_two_stage(planted, quick(max_epochs=20), t=5)
        assert report.notes["snapshots"] == 4
        assert report.notes["snapshot_epoch"] in (5, 10, 15, 20)
        assert len(report.history) == 20
        assert all(h.loss_c == 0.0 for h in report.history)

    def test_two_stage_single_snapshot(self, planted):
        report = train_two_stage(planted, quick(max_epochs=8), t=50)
        assert report.notes["snapshots"] == 1
        assert report.notes["snapshot_epoch"] == 8

    def test_two_stage_needs_noise(self, planted):
        with pytest.raises(ConfigError):
            train_two_stage(planted, quick(r=0.0, max_epochs=3))
        with pytest.raises(ConfigError):
            train_two_stage(planted, quick(max_epochs=3), t=0)

    def test_self_training_zeta_zero(self, planted):
        config = quick(seed=2)
        assert self_training(planted, config, zeta=0) == train_slaps(planted, config, experiment="self-training")

    def test_self_training_adds_labels(self, planted):
        report = self_training(planted, quick(max_epochs=15), zeta=10)
        assert report.notes["pseudo_labels"] == 10

    def test_self_training_warns_on_few_nodes(self):
        dataset = small_dataset()
        with pytest.warns(RuntimeWarning, match="unlabeled"):
            self_training(dataset, quick(k=3, max_epochs=3), zeta=5)

    def test_pseudo_labels(self):
        probs = np.array([[0.9, 0.1], [0.4, 0.6], [0.2, 0.8], [0.8, 0.2], [0.5, 0.5]])
        chosen, labels = pseudo_labels(probs, np.array([1, 2, 3, 4]), 2)
        assert chosen.tolist() == [2, 3]
        assert labels.tolist() == [1, 0]

    def test_ada_edge_edit(self):
        graph = SparseGraph.from_edges(4, [(0, 1), (1, 2)])
        probs = np.array([[0.95, 0.05], [0.02, 0.98], [0.97, 0.03], [0.91, 0.09]])
        edited, added, removed = ada_edge_edit(graph, probs, 0.9)
        assert edited.edge_set() == {(0, 2), (0, 3), (2, 3)}
        assert (added, removed) == (3, 2)
        assert not np.any(edited.rows == edited.cols)

    def test_ada_edge_unreachable_threshold(self, planted):
        report = ada_edge(planted, quick(max_epochs=10), conf_threshold=1.0)
        assert report.notes["rounds"] == 1
        assert report.notes["edges_added"] == report.notes["edges_removed"] == 0


class TestExperiments:
    def test_run_seeds_and_summary(self, planted):
        reports = run_seeds("mlp", planted, quick(), [0, 1, 2])
        assert [r.seed for r in reports] == [0, 1, 2]
        summary = summarize(reports)
        assert summary["runs"] == 3
        assert summary["mean"] == pytest.approx(np.mean([r.test_accuracy for r in reports]))

    def test_grid_search(self, planted):
        base = quick(k=10, eta=1.0)
        config, report, results = grid_search(planted, base, {"lr_c": [0.01, 0.001]}, "mlp")
        assert len(results) == 2
        assert config.lr_c in (0.01, 0.001)
        assert report.test_accuracy is not None

    def test_grid_search_rejects_off_grid_values(self, planted):
        with pytest.raises(ConfigError):
            grid_search(planted, quick(), {"k": [7]}, "mlp")

    def test_run_seeds_builds_a_dataset_per_seed(self):
        seen = []

        def factory(seed):
            seen.append(seed)
            return generate_planted(seed=seed)

        reports = run_seeds("mlp", factory, quick(), [3, 4])
        assert seen == [3, 4]
        assert [r.seed for r in reports] == [3, 4]


class TestSelection:
    @pytest.mark.parametrize("name, expected", [("wine", "loss"), ("cancer", "loss"), ("digits", "accuracy")])
    def test_dataset_default(self, name, expected):
        assert selection(create_config(), load_builtin(name, 0)) == expected

    def test_config_wins(self):
        assert selection(create_config(select_by="accuracy"), load_builtin("wine", 0)) == "accuracy"
        assert selection(create_config(select_by="loss"), generate_planted(seed=0)) == "loss"

    def test_wine_selects_by_loss(self):
        dataset = load_builtin("wine", 0)
        assert train_mlp(dataset, quick(max_epochs=5, fixed_graph_epochs=5)).notes["select_by"] == "loss"
        assert train_slaps(dataset, quick(max_epochs=5)).notes["select_by"] == "loss"

    def test_loss_selection_keeps_lowest_validation_loss(self):
        dataset = load_builtin("cancer", 0)
        report = train_slaps(dataset, quick(max_epochs=20))
        checked = [h for h in report.history if h.val_loss is not None]
        assert report.val_loss == pytest.approx(min(h.val_loss for h in checked))

    def test_group_accuracy(self, planted):
        report = train_knn_gcn(planted, quick())
        groups = group_accuracy(report, planted)
        assert groups["with_labeled_neighbour_count"] + groups["without_labeled_neighbour_count"] == len(planted.test)


def test_gradient_check():
    assert gradient_check(seed=0) < 1e-5


@pytest.mark.parametrize("generator", ["fp", "mlp", "mlp_d"])
@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4, 5])
def test_gradient_check_seeds(generator, seed):
    assert gradient_check(seed=seed, generator=generator) < 1e-5


@pytest.mark.slow
class TestReproduction:
    @pytest.mark.parametrize(
        "name, generator, threshold",
        [("wine", "mlp", 0.94), ("cancer", "mlp_d", 0.945), ("digits", "fp", 0.915)],
    )
    def test_small_datasets(self, name, generator, threshold):
        reports = []
        for seed in range(10):
            dataset = load_builtin(name, seed)
            config = create_config(tuned=name, generator=generator, seed=seed, max_epochs=500)
            reports.append(train_slaps(dataset, config))
        assert summarize(reports)["mean"] >= threshold
        assert reports[0].notes["select_by"] == ("accuracy" if name == "digits" else "loss")

    def test_knn_gcn_wine(self):
        reports = [train_knn_gcn(load_builtin("wine", seed), create_config(seed=seed)) for seed in range(10)]
        assert abs(summarize(reports)["mean"] - 0.935) <= 0.025

    def test_self_supervision_helps(self):
        def mean_accuracy(lam):
            reports = []
            for seed in range(5):
                dataset = generate_planted(seed=seed)
                reports.append(train_slaps(dataset, create_config(lam=lam, seed=seed, max_epochs=300)))
            return summarize(reports)["mean"]

        best = max(mean_accuracy(lam) for lam in (1.0, 10.0, 100.0))
        assert best >= mean_accuracy(0.0) + 0.02



@pytest.mark.slow
class TestVariantComparisons:
    seeds = range(5)

    def test_two_stage_beats_knn_gcn(self):
        two_stage, knn = [], []
        for seed in self.seeds:
            dataset = generate_planted(seed=seed)
            config = create_config(seed=seed, max_epochs=200)
            two_stage.append(train_two_stage(dataset, config))
            knn.append(train_knn_gcn(dataset, config))
        assert summarize(two_stage)["mean"] > summarize(knn)["mean"]

    def test_self_training_improves(self):
        plain, augmented = [], []
        for seed in self.seeds:
            dataset = generate_planted(n=200, seed=seed)
            config = create_config(seed=seed, max_epochs=300)
            plain.append(train_slaps(dataset, config))
            augmented.append(self_training(dataset, config, zeta=50))
        assert summarize(augmented)["mean"] > summarize(plain)["mean"]

    def test_ada_edge_round_raises_homophily(self):
        before, after = [], []
        for seed in self.seeds:
            dataset = generate_planted(seed=seed)
            noisy = perturb_graph(dataset.reference_graph, 50, rng=seed)
            report = train_knn_gcn(dataset, create_config(seed=seed))
            edited, added, _ = ada_edge_edit(noisy, report.probabilities, 0.9)
            assert added > 0
            before.append(edge_homophily_ratio(noisy, dataset.y))
            after.append(edge_homophily_ratio(edited, dataset.y))
        assert np.mean(after) > np.mean(before)
