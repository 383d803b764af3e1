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

"""Command line entry point `lgl`"""

import argparse
import functools
import os
import sys

from ._version import __version__
from .datasets import BUILTIN, DatasetError, generate_planted, load_builtin, load_dataset
from .defaults import ConfigError, create_config, get_defaults, set_defaults
from .graph_analysis import (
    AnalysisError,
    count_starved_edges,
    homophily_odds,
    perturb_graph,
    recovery_metrics,
    starved_prob_er,
    starved_prob_monte_carlo,
    starved_prob_sf,
)
from .generators import knn_graph
from .mp_runs import run_seeds
from .random_graphs import rng_from
from .serialize import ReportWriter, read_config, records_from_metrics, save_binary, save_dataset
from .trainer import TrainingDivergedError, grid_search, gradient_check, summarize, train_slaps
from .utils import info

GRADIENT_TOLERANCE = 1e-5

TRAIN_MODELS = ("slaps", "knn-gcn", "mlp")


class KeyValue(argparse.Action):
    """Collect repeated KEY=VALUE options into a dict"""

    def __call__(self, parser, namespace, values, option_string=None):
        if "=" not in values:
            parser.error(f"{option_string} expects KEY=VALUE, got '{values}'")
        key, value = values.split("=", 1)
        items = dict(getattr(namespace, self.dest) or {})
        items[key.strip()] = value.strip()
        setattr(namespace, self.dest, items)


#
# Parser
#


def _common_parser():
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("experiment")
    group.add_argument("--dataset", default="planted", help="builtin name (wine, cancer, digits), 'planted' or a manifest path")
    group.add_argument("--config", help="key = value config file")
    group.add_argument(
        "--tuned",
        nargs="?",
        const=True,
        metavar="NAME",
        help="start from the tuned hyperparameters of NAME (default: the --dataset name) and the generator",
    )
    group.add_argument("--set", dest="overrides", action=KeyValue, default={}, metavar="KEY=VALUE", help="config override")
    group.add_argument("--seed", type=int, help="first seed")
    group.add_argument("--runs", type=int, help="number of seeds")
    group.add_argument("--workers", type=int, help="processes for independent seeds")
    group.add_argument("--generator", choices=("fp", "mlp", "mlp_d"))
    group.add_argument("--lam", type=float, help="weight of the denoising loss")
    group.add_argument("-k", type=int, dest="k", help="neighbours of the kNN graph")
    group.add_argument("--epochs", type=int, dest="max_epochs", help="training epochs")

    output = common.add_argument_group("output")
    output.add_argument("--out", help="append JSON report records to this file ('-' = stdout)")
    output.add_argument("--save-model", help="pickle the training reports to this file")
    output.add_argument("-v", "--verbose", action="count", default=0, help="more log output")
    output.add_argument("--quiet", action="store_true", help="warnings and errors only")
    output.add_argument("--progress", action="store_true", help="show an epoch progress bar")
    output.add_argument("--timeit", action="store_true", help="print stage timings")
    return common


def create_parser():
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="lgl", description="Latent graph learning experiments")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    train = sub.add_parser("train", parents=[common], help="joint graph and classifier training or a baseline")
    train.add_argument("--model", choices=TRAIN_MODELS, default="slaps")

    two_stage = sub.add_parser("two-stage", parents=[common], help="learn the graph first, train a fresh classifier on it")
    two_stage.add_argument("-t", type=int, help="epochs between adjacency snapshots")

    self_train = sub.add_parser("self-train", parents=[common], help="add confident pseudo-labels and retrain")
    self_train.add_argument("--zeta", type=int, help="pseudo-labels to add")

    ada = sub.add_parser("ada-edge", parents=[common], help="edit the kNN graph by confident predictions")
    ada.add_argument("--threshold", type=float, help="confidence threshold")

    analyze = sub.add_parser("analyze", help="graph analyses")
    analyses = analyze.add_subparsers(dest="analysis", metavar="analysis")
    analyses.required = True

    starved = analyses.add_parser("starved", parents=[common], help="starved-edge probability")
    mode = starved.add_mutually_exclusive_group(required=True)
    mode.add_argument("--er", action="store_true", help="closed form for G(n, m)")
    mode.add_argument("--sf", action="store_true", help="closed form for scale-free degree weights")
    mode.add_argument("--mc", action="store_true", help="Monte-Carlo estimate for G(n, m)")
    mode.add_argument("--count", action="store_true", help="fraction of starved edges of the dataset graph")
    starved.add_argument("-n", type=int, help="nodes")
    starved.add_argument("-m", type=int, help="edges")
    starved.add_argument("-q", type=int, help="labeled nodes")
    starved.add_argument("--gamma", type=float, help="degree weight exponent")
    starved.add_argument("--trials", type=int, default=20000)

    homophily = analyses.add_parser("homophily", parents=[common], help="edge homophily and same-label odds")
    homophily.add_argument("--source", choices=("input", "knn", "learned"), default="learned")
    homophily.add_argument("--bins", help="comma separated bin edges")

    perturb = sub.add_parser("perturb", parents=[common], help="replace a share of the edges by random ones")
    perturb.add_argument("--rho", type=float, required=True, help="percent of edges to replace")
    perturb.add_argument("--save-dataset", help="write the perturbed dataset into this directory")
    perturb.add_argument("--train", action="store_true", help="learn from the noisy graph and report recovery")

    gradcheck = sub.add_parser("gradcheck", help="finite-difference check of the joint loss")
    gradcheck.add_argument("--seed", type=int, default=0)
    gradcheck.add_argument("--generator", choices=("fp", "mlp", "mlp_d"), default="mlp")
    gradcheck.add_argument("-v", "--verbose", action="count", default=0)

    grid = sub.add_parser("grid", parents=[common], help="grid search selected on validation")
    grid.add_argument("--operation", choices=("slaps", "two-stage", "self-train", "ada-edge", "knn-gcn", "mlp"), default="slaps")
    grid.add_argument("--grid", dest="grid", action=KeyValue, default={}, metavar="KEY=V1,V2", help="restrict a grid")

    return parser


#
# Helpers
#


def resolve_dataset(name, seed=0):
    if name in BUILTIN:
        return load_builtin(name, seed)
    if name == "planted":
        return generate_planted(seed=seed)
    if os.path.exists(name):
        return load_dataset(name)
    raise DatasetError(f"unknown dataset '{name}', expected one of {sorted(BUILTIN)}, 'planted' or a manifest path")


def build_config(args, **extra):
    base = read_config(args.config) if args.config else None
    tuned = getattr(args, "tuned", None)
    if tuned is True:
        tuned = os.path.splitext(os.path.basename(args.dataset))[0]
    overrides = dict(args.overrides)
    for key in ("seed", "runs", "workers", "generator", "lam", "k", "max_epochs"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    overrides.update({k: v for k, v in extra.items() if v is not None})
    return create_config(base, tuned=tuned, **overrides)


def _output_defaults(args):
    values = {}
    if getattr(args, "quiet", False):
        values["verbose"] = 0
    elif getattr(args, "verbose", 0):
        values["verbose"] = 1 + args.verbose
    if getattr(args, "progress", False):
        values["progress"] = True
    if getattr(args, "timeit", False):
        values["timeit"] = True
    return values


def _emit(args, records):
    if args.out is None:
        return
    with ReportWriter(args.out) as writer:
        writer.extend(records)


def _save(args, reports, config):
    if getattr(args, "save_model", None):
        save_binary(reports, args.save_model, metadata=config.to_dict())
        info(f"saved {len(reports)} report(s) to {args.save_model}")


def _seeds(config):
    return list(range(config.seed, config.seed + config.runs))


def _run_experiment(args, operation, experiment, config):
    # seed s trains on the split (and planted data) drawn for seed s, manifests keep their split
    if args.dataset in BUILTIN or args.dataset == "planted":
        dataset, name = functools.partial(resolve_dataset, args.dataset), args.dataset
    else:
        dataset = resolve_dataset(args.dataset, config.seed)
        name = dataset.name
    reports = run_seeds(operation, dataset, config, _seeds(config), config.workers)
    records = []
    for report in reports:
        records += records_from_metrics(experiment, report.seed, report.metrics(), config)
    summary = summarize(reports)
    records += records_from_metrics(
        experiment,
        None,
        {"test_accuracy_mean": summary["mean"], "test_accuracy_std": summary["std"], "runs": summary["runs"]},
        config,
    )
    _emit(args, records)
    _save(args, reports, config)
    print(f"{experiment} on {name}: {100 * summary['mean']:.1f} ± {100 * summary['std']:.1f} ({summary['runs']} runs)")
    return 0


#
# Commands
#


def cmd_train(args):
    config = build_config(args)
    return _run_experiment(args, args.model, args.model, config)


def cmd_two_stage(args):
    return _run_experiment(args, "two-stage", "two-stage", build_config(args, two_stage_t=args.t))


def cmd_self_train(args):
    return _run_experiment(args, "self-train", "self-train", build_config(args, zeta=args.zeta))


def cmd_ada_edge(args):
    return _run_experiment(args, "ada-edge", "ada-edge", build_config(args, ada_threshold=args.threshold))


def _require(args, *names):
    missing = [f"-{n}" if len(n) == 1 else f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise AnalysisError(f"missing {', '.join(missing)}")


def cmd_starved(args):
    config = build_config(args)
    if args.er:
        _require(args, "n", "m", "q")
        metric, value = "starved_prob_er", starved_prob_er(args.n, args.m, args.q)
        print(f"{value:.3f}")
        records = records_from_metrics(metric, None, {"n": args.n, "m": args.m, "q": args.q, metric: value})
    elif args.sf:
        _require(args, "n", "q", "gamma")
        metric, value = "starved_prob_sf", starved_prob_sf(args.n, args.q, args.gamma)
        print(f"{value:.3f}")
        records = records_from_metrics(metric, None, {"n": args.n, "q": args.q, "gamma": args.gamma, metric: value})
    elif args.mc:
        _require(args, "n", "m", "q")
        estimate, se = starved_prob_monte_carlo(
            args.n, args.m, args.q, args.trials, rng_from(config.seed), workers=config.workers
        )
        print(f"{estimate:.3f} ± {se:.3f}")
        records = records_from_metrics(
            "starved_prob_monte_carlo", config.seed, {"estimate": estimate, "std_error": se, "trials": args.trials}
        )
    else:
        dataset = resolve_dataset(args.dataset, config.seed)
        graph = dataset.graph if dataset.graph is not None else dataset.reference_graph
        if graph is None:
            graph = knn_graph(dataset.X, config.k)
        value = count_starved_edges(graph, dataset.train)
        print(f"{value:.3f}")
        records = records_from_metrics("count_starved_edges", config.seed, {"starved_fraction": value})
    _emit(args, records)
    return 0


def cmd_homophily(args):
    config = build_config(args)
    dataset = resolve_dataset(args.dataset, config.seed)
    if args.source == "input":
        graph = dataset.graph if dataset.graph is not None else dataset.reference_graph
        if graph is None:
            raise DatasetError(f"dataset '{dataset.name}' has no input graph")
    elif args.source == "knn":
        graph = knn_graph(dataset.X, config.k)
    else:
        report = train_slaps(dataset, config)
        _save(args, [report], config)
        graph = report.adjacency

    bins = None
    if args.bins:
        try:
            bins = [float(b) for b in args.bins.split(",")]
        except ValueError as ex:
            raise AnalysisError(f"bad bin edges '{args.bins}'") from ex
    profile = homophily_odds(graph, dataset.y, dataset.test, bins)

    print(f"edge homophily ratio: {profile.ratio:.3f}")
    for lo, hi, odds in zip([None] + profile.edges[:-1], profile.edges, profile.odds):
        label = f"w = {hi:g}" if lo is None else f"{lo:g} < w <= {hi:g}"
        print(f"  {label:>24}: {'-' if odds is None else f'{odds:.3f}'}")
    _emit(args, records_from_metrics(f"homophily-{args.source}", config.seed, profile.as_dict(), config))
    return 0


def cmd_perturb(args):
    config = build_config(args)
    dataset = resolve_dataset(args.dataset, config.seed)
    original = dataset.graph if dataset.graph is not None else dataset.reference_graph
    if original is None:
        raise DatasetError(f"dataset '{dataset.name}' has no graph to perturb")
    noisy = perturb_graph(original, args.rho, rng_from(config.seed))
    noisy_dataset = dataset.with_graph(noisy)
    metrics = {"rho": args.rho, "edges": len(noisy.edge_set())}

    if args.save_dataset:
        path = save_dataset(noisy_dataset, args.save_dataset, name=f"{dataset.name}-rho{args.rho:g}")
        print(f"wrote {path}")
    if args.train:
        report = train_slaps(noisy_dataset, config)
        _save(args, [report], config)
        recovery = recovery_metrics(original, noisy, report.adjacency)
        metrics.update(recovery._asdict())
        metrics["test_accuracy"] = report.test_accuracy
        print(f"noisy edges removed: {100 * recovery.noisy_removed:.1f}%")
        print(f"removed edges recovered: {100 * recovery.removed_recovered:.1f}%")
    _emit(args, records_from_metrics("perturb", config.seed, metrics, config))
    return 0


def cmd_gradcheck(args):
    result = gradient_check(seed=args.seed, generator=args.generator)
    print(f"max relative error: {result:.3e}")
    return 0 if result < GRADIENT_TOLERANCE else 1


def cmd_grid(args):
    base = build_config(args)
    grid = None
    if args.grid:
        grid = {}
        for key, values in args.grid.items():
            try:
                grid[key] = [float(v) if "." in v or "e" in v.lower() else int(v) for v in values.split(",")]
            except ValueError as ex:
                raise ConfigError(f"bad grid values for {key}: '{values}'") from ex
    dataset = resolve_dataset(args.dataset, base.seed)
    config, report, results = grid_search(dataset, base, grid, args.operation)
    changed = {k: v for k, v in config.to_dict().items() if v != base.to_dict()[k]}
    print(f"best of {len(results)}: {changed or 'base config'}, test accuracy {100 * report.test_accuracy:.1f}")
    _emit(args, records_from_metrics(f"grid-{args.operation}", config.seed, report.metrics(), config))
    _save(args, [report], config)
    return 0


COMMANDS = {
    "train": cmd_train,
    "two-stage": cmd_two_stage,
    "self-train": cmd_self_train,
    "ada-edge": cmd_ada_edge,
    "perturb": cmd_perturb,
    "gradcheck": cmd_gradcheck,
    "grid": cmd_grid,
    ("analyze", "starved"): cmd_starved,
    ("analyze", "homophily"): cmd_homophily,
}


def run_cli(argv=None):
    """Parse argv, run the command and return the exit status"""
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        return ex.code if isinstance(ex.code, int) else 2

    command = COMMANDS[(args.command, args.analysis) if args.command == "analyze" else args.command]
    saved = dict(get_defaults())
    set_defaults(**_output_defaults(args))
    try:
        return command(args)
    except (DatasetError, ConfigError, AnalysisError, TrainingDivergedError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 1
    finally:
        set_defaults(**saved)


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
