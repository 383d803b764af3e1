import json

import pytest

from latent_graph import cli
from latent_graph.cli import run_cli
from latent_graph.datasets import load_builtin
from latent_graph.defaults import get_default
from latent_graph.serialize import load_binary, read_reports

FAST = ["--runs", "2", "--epochs", "5", "--set", "fixed_graph_epochs=5", "--set", "hidden_c=8", "--set", "hidden_dae=8", "-k", "5"]


def test_starved_er(capsys):
    assert run_cli(["analyze", "starved", "--er", "-n", "2708", "-m", "5429", "-q", "140"]) == 0
    assert capsys.readouterr().out.strip() == "0.594"


def test_starved_sf(capsys):
    assert run_cli(["analyze", "starved", "--sf", "-n", "2708", "-q", "140", "--gamma", "-3"]) == 0
    assert capsys.readouterr().out.strip() == "0.870"


def test_starved_records(capsys):
    assert run_cli(["analyze", "starved", "--er", "-n", "100", "-m", "200", "-q", "10", "--out", "-"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    records = [json.loads(line) for line in lines[1:]]
    assert [r["metric"] for r in records] == ["n", "m", "q", "starved_prob_er"]


def test_starved_missing_option(capsys):
    assert run_cli(["analyze", "starved", "--er", "-n", "100"]) == 1
    assert "missing -m, -q" in capsys.readouterr().err


def test_starved_count(capsys):
    assert run_cli(["analyze", "starved", "--count"]) == 0
    assert 0.0 <= float(capsys.readouterr().out) <= 1.0


def test_gradcheck(capsys):
    assert run_cli(["gradcheck"]) == 0
    assert run_cli(["gradcheck", "--generator", "fp", "--seed", "1"]) == 0
    assert capsys.readouterr().out.startswith("max relative error:")


def test_usage_errors():
    assert run_cli(["unknown"]) == 2
    assert run_cli([]) == 2
    assert run_cli(["analyze", "starved", "--er", "--sf"]) == 2


def test_bad_dataset(capsys):
    assert run_cli(["train", "--dataset", "nowhere"]) == 1
    assert capsys.readouterr().err.startswith("error: unknown dataset")


def test_bad_override(capsys):
    assert run_cli(["train", "--set", "dropout_c=2"]) == 1
    assert "dropout_c" in capsys.readouterr().err


def test_output_defaults_are_restored():
    run_cli(["analyze", "starved", "--er", "-n", "10", "-m", "5", "-q", "1", "--quiet", "--timeit"])
    assert get_default("verbose") == 0
    assert get_default("timeit") is False


def test_train_is_reproducible(tmp_path, capsys):
    runs = []
    for name in ("a", "b"):
        out = tmp_path / f"{name}.jsonl"
        assert run_cli(["train", "--out", str(out)] + FAST) == 0
        runs.append(out.read_bytes())
    assert runs[0] == runs[1]
    records = read_reports(str(tmp_path / "a.jsonl"))
    assert {r["seed"] for r in records} == {0, 1, None}
    assert "slaps on planted" in capsys.readouterr().out


@pytest.mark.parametrize(
    "command",
    [
        ["train", "--model", "mlp"],
        ["train", "--model", "knn-gcn"],
        ["two-stage", "-t", "5"],
        ["self-train", "--zeta", "4"],
        ["ada-edge", "--threshold", "0.95"],
    ],
)
def test_experiments(command, tmp_path):
    out = tmp_path / "reports.jsonl"
    assert run_cli(command + ["--out", str(out)] + FAST) == 0
    metrics = {r["metric"] for r in read_reports(str(out))}
    assert {"test_accuracy", "test_accuracy_mean", "runs"} <= metrics


def test_save_model(tmp_path):
    target = tmp_path / "reports.pkl"
    assert run_cli(["train", "--model", "mlp", "--save-model", str(target)] + FAST) == 0
    reports, metadata = load_binary(str(target))
    assert [r.seed for r in reports] == [0, 1]
    assert metadata["runs"] == 2


def test_config_file(tmp_path, capsys):
    (tmp_path / "run.cfg").write_text("runs = 1\nseed = 3\n")
    assert run_cli(["train", "--model", "mlp", "--config", str(tmp_path / "run.cfg"), "--out", "-"] + FAST) == 0
    records = [json.loads(line) for line in capsys.readouterr().out.splitlines() if line.startswith("{")]
    assert records[0]["seed"] == 3
    assert records[0]["config"]["fixed_graph_epochs"] == 5


def test_homophily(capsys):
    assert run_cli(["analyze", "homophily", "--source", "knn", "--bins", "0,0.5"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("edge homophily ratio:")
    assert "w = 0" in out


def test_perturb(tmp_path, capsys):
    assert run_cli(["perturb", "--rho", "25", "--save-dataset", str(tmp_path), "--train"] + FAST) == 0
    out = capsys.readouterr().out
    assert "noisy edges removed" in out
    assert (tmp_path / "planted-rho25.manifest").exists()
    assert run_cli(["train", "--model", "mlp", "--dataset", str(tmp_path / "planted-rho25.manifest")] + FAST) == 0


def test_grid(capsys):
    command = ["grid", "--operation", "mlp", "--grid", "lr_c=0.01,0.001", "-k", "10", "--set", "eta=1", "--epochs", "5"]
    assert run_cli(command + ["--set", "fixed_graph_epochs=5"]) == 0
    assert capsys.readouterr().out.startswith("best of 2")


def test_tuned(tmp_path, capsys):
    out = tmp_path / "reports.jsonl"
    assert run_cli(["train", "--model", "mlp", "--dataset", "wine", "--tuned", "--out", str(out)] + FAST) == 0
    config = read_reports(str(out))[0]["config"]
    assert (config["lam"], config["r"], config["k"]) == (0.1, 5.0, 5)
    assert run_cli(["train", "--tuned", "iris"] + FAST) == 1
    assert "no tuned hyperparameters" in capsys.readouterr().err


def test_seeds_draw_their_own_split(monkeypatch, capsys):
    seen = []

    def load(name, seed=0):
        seen.append(seed)
        return load_builtin(name, seed)

    monkeypatch.setattr(cli, "load_builtin", load)
    assert run_cli(["train", "--model", "mlp", "--dataset", "wine", "--seed", "3"] + FAST) == 0
    assert seen == [3, 4]
    assert "mlp on wine" in capsys.readouterr().out
