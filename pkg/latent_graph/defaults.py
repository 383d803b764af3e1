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

from dataclasses import dataclass, fields
from typing import Optional

from .utils import warn

GENERATORS = ("fp", "mlp", "mlp_d")
P_KINDS = ("relu", "elu_plus_one")
SYM_MODES = ("mean", "max", "none")
NORM_MODES = ("symmetric", "row")
NOISE_SCHEMES = ("binary", "zero", "gaussian")

# hyperparameter grids used for tuning
TUNING_GRID = {
    "lam": (0.1, 1.0, 10.0, 100.0, 500.0),
    "lr_c": (0.01, 0.001),
    "lr_dae": (0.01, 0.001),
    "dropout_c": (0.25, 0.5),
    "dropout_dae": (0.25, 0.5),
    "k": (10, 15, 20, 30),
    "r": (1.0, 5.0, 10.0),
    "eta": (1.0, 5.0),
    "zeta": (50, 100, 200, 300, 400, 500),
}

# best hyperparameters per (dataset, generator) chosen on the validation sets
TUNED_KEYS = ("lr_c", "lr_dae", "dropout_c", "dropout_dae", "k", "lam", "r", "eta")
_TUNED_ROWS = (
    ("cora", "fp", 0.001, 0.01, 0.5, 0.25, 30, 10, 10, 5),
    ("cora", "mlp", 0.01, 0.001, 0.25, 0.5, 20, 10, 10, 5),
    ("cora", "mlp_d", 0.01, 0.001, 0.25, 0.5, 15, 10, 10, 5),
    ("citeseer", "fp", 0.01, 0.01, 0.5, 0.5, 30, 1, 10, 1),
    ("citeseer", "mlp", 0.01, 0.001, 0.25, 0.5, 30, 10, 10, 5),
    ("citeseer", "mlp_d", 0.001, 0.01, 0.5, 0.5, 20, 10, 10, 5),
    ("cora390", "fp", 0.01, 0.01, 0.25, 0.5, 20, 100, 10, 5),
    ("cora390", "mlp", 0.01, 0.001, 0.25, 0.5, 20, 10, 10, 5),
    ("cora390", "mlp_d", 0.001, 0.001, 0.25, 0.5, 20, 10, 10, 5),
    ("citeseer370", "fp", 0.01, 0.01, 0.5, 0.5, 30, 1, 10, 1),
    ("citeseer370", "mlp", 0.01, 0.001, 0.25, 0.5, 30, 10, 10, 5),
    ("citeseer370", "mlp_d", 0.01, 0.01, 0.25, 0.5, 20, 10, 10, 5),
    ("pubmed", "mlp", 0.01, 0.01, 0.5, 0.5, 15, 10, 10, 5),
    ("pubmed", "mlp_d", 0.01, 0.01, 0.25, 0.25, 15, 100, 5, 5),
    ("ogbn-arxiv", "mlp", 0.01, 0.001, 0.25, 0.5, 15, 10, 1, 5),
    ("ogbn-arxiv", "mlp_d", 0.01, 0.001, 0.5, 0.25, 15, 10, 1, 5),
    ("wine", "fp", 0.01, 0.001, 0.5, 0.5, 20, 0.1, 5, 5),
    ("wine", "mlp", 0.01, 0.001, 0.5, 0.25, 20, 0.1, 5, 5),
    ("wine", "mlp_d", 0.01, 0.01, 0.25, 0.5, 10, 1, 5, 5),
    ("cancer", "fp", 0.01, 0.001, 0.5, 0.25, 20, 0.1, 5, 5),
    ("cancer", "mlp", 0.01, 0.001, 0.5, 0.5, 20, 1, 5, 5),
    ("cancer", "mlp_d", 0.01, 0.01, 0.5, 0.5, 20, 0.1, 5, 5),
    ("digits", "fp", 0.01, 0.001, 0.25, 0.5, 20, 0.1, 5, 5),
    ("digits", "mlp", 0.01, 0.001, 0.25, 0.5, 20, 10, 5, 5),
    ("digits", "mlp_d", 0.01, 0.001, 0.5, 0.25, 15, 0.1, 5, 5),
    ("20news", "fp", 0.01, 0.01, 0.5, 0.5, 20, 500, 5, 5),
    ("20news", "mlp", 0.001, 0.001, 0.25, 0.5, 20, 500, 5, 5),
    ("20news", "mlp_d", 0.01, 0.01, 0.25, 0.25, 20, 100, 5, 5),
    ("mnist1000", "mlp", 0.01, 0.01, 0.5, 0.5, 15, 10, 10, 5),
    ("mnist2000", "mlp_d", 0.01, 0.001, 0.5, 0.5, 15, 100, 10, 5),
    ("mnist3000", "mlp", 0.01, 0.01, 0.5, 0.5, 15, 10, 5, 5),
)
TUNED = {
    (name, generator): {key: int(v) if key == "k" else float(v) for key, v in zip(TUNED_KEYS, values)}
    for name, generator, *values in _TUNED_ROWS
}


class ConfigError(ValueError):
    pass


class Defaults:
    def __init__(self):
        self.reset_defaults()

    def get_defaults(self):
        return self.defaults

    def get_default(self, key, default_value=None):
        return self.defaults.get(key, default_value)

    def set_defaults(self, **kwargs):
        """Set defaults for experiments

        Valid keywords:

        OBJECTIVE
        - lam:                  Weight of the denoising loss in L = L_C + lam * L_DAE (default=10)
        - r:                    Percent of feature cells masked per epoch (default=10)
        - eta:                  Ratio of masked zeros to masked ones for binary features (default=5)
        - noise:                "binary", "zero" or "gaussian"; None derives it from the feature kind (default=None)
        - sigma:                Standard deviation of the gaussian noise scheme (default=0.1)

        GRAPH
        - generator:            "fp", "mlp" or "mlp_d" (default="mlp")
        - k:                    Neighbours per node of the kNN graph (default=20)
        - p_kind:               "relu" or "elu_plus_one"; None picks relu for MLP generators and
                                elu_plus_one for FP (default=None)
        - sym_mode:             "mean", "max" or "none" (default="mean")
        - norm_mode:            "symmetric" or "row" (default="symmetric")
        - add_self_loops:       Add I before normalizing (default=False)
        - mask_refresh:         Recompute the kNN mask every "step" or once per "epoch" (default="step")
        - train_generator:      Update the generator parameters (default=True)
        - fp_floor:             Pre-image of non-edges for FP with elu_plus_one (default=-6)
        - adj_dropout_position: Adjacency dropout "after" or "before" normalization (default="after")

        NETWORKS
        - hidden_c:             Hidden width of the classifier (default=32)
        - hidden_dae:           Hidden width of the denoiser, capped at 2f (default=512)
        - layers:               Classifier depth, only changed for the depth ablation (default=2)
        - dropout_hidden:       Dropout after the first layer of both networks (default=0.5)
        - dropout_c:            Adjacency dropout of the classifier (default=0.25)
        - dropout_dae:          Adjacency dropout of the denoiser (default=0.5)

        OPTIMIZATION
        - lr_c:                 Learning rate of the classifier (default=0.01)
        - lr_dae:               Learning rate of all other parameters (default=0.001)
        - weight_decay:         L2 penalty added to the gradients of both groups (default=0)
        - max_epochs:           Number of epochs (default=2000)
        - eval_every:           Epochs between validation checks (default=1)
        - patience:             Stop after this many checks without improvement, None disables (default=None)
        - select_by:            Checkpoint selection on validation "accuracy" or "loss"; None follows the
                                dataset, which picks loss for Wine and Cancer (default=None)
        - fixed_graph_epochs:   Epochs of the classifiers trained on frozen graphs (default=200)

        EXPERIMENTS
        - seed:                 Seed of the run (default=0)
        - runs:                 Number of seeds per experiment (default=10)
        - two_stage_t:          Epochs between adjacency snapshots of the two-stage variant (default=10)
        - zeta:                 Pseudo-labels added by self-training (default=0)
        - ada_threshold:        Confidence threshold of AdaEdge (default=0.9)
        - ada_rounds:           Maximum number of AdaEdge rounds (default=5)
        - workers:              Processes used for independent seeds (default=1)

        OUTPUT (not part of an experiment config)
        - verbose:              0 = warnings only, 1 = info, 2 = debug (default=1)
        - timeit:               Timing output level, False or 0..3 (default=False)
        - progress:             Show an epoch progress bar (default=False)
        """

        for k, v in kwargs.items():
            if k not in self.defaults:
                warn(f"Parameter {k} is not a valid default and is ignored")
            else:
                self.defaults[k] = v

    def reset_defaults(self):
        self.defaults = {
            #
            # objective
            #
            "lam": 10.0,
            "r": 10.0,
            "eta": 5.0,
            "noise": None,
            "sigma": 0.1,
            #
            # graph
            #
            "generator": "mlp",
            "k": 20,
            "p_kind": None,
            "sym_mode": "mean",
            "norm_mode": "symmetric",
            "add_self_loops": False,
            "mask_refresh": "step",
            "train_generator": True,
            "fp_floor": -6.0,
            "adj_dropout_position": "after",
            #
            # networks
            #
            "hidden_c": 32,
            "hidden_dae": 512,
            "layers": 2,
            "dropout_hidden": 0.5,
            "dropout_c": 0.25,
            "dropout_dae": 0.5,
            #
            # optimization
            #
            "lr_c": 0.01,
            "lr_dae": 0.001,
            "weight_decay": 0.0,
            "max_epochs": 2000,
            "eval_every": 1,
            "patience": None,
            "select_by": None,
            "fixed_graph_epochs": 200,
            #
            # experiments
            #
            "seed": 0,
            "runs": 10,
            "two_stage_t": 10,
            "zeta": 0,
            "ada_threshold": 0.9,
            "ada_rounds": 5,
            "workers": 1,
            #
            # output
            #
            "verbose": 1,
            "timeit": False,
            "progress": False,
        }


OUTPUT_KEYS = ("verbose", "timeit", "progress")


@dataclass(frozen=True)
class ExperimentConfig:
    lam: float = 10.0
    r: float = 10.0
    eta: float = 5.0
    noise: Optional[str] = None
    sigma: float = 0.1
    generator: str = "mlp"
    k: int = 20
    p_kind: Optional[str] = None
    sym_mode: str = "mean"
    norm_mode: str = "symmetric"
    add_self_loops: bool = False
    mask_refresh: str = "step"
    train_generator: bool = True
    fp_floor: float = -6.0
    adj_dropout_position: str = "after"
    hidden_c: int = 32
    hidden_dae: int = 512
    layers: int = 2
    dropout_hidden: float = 0.5
    dropout_c: float = 0.25
    dropout_dae: float = 0.5
    lr_c: float = 0.01
    lr_dae: float = 0.001
    weight_decay: float = 0.0
    max_epochs: int = 2000
    eval_every: int = 1
    patience: Optional[int] = None
    select_by: Optional[str] = None
    fixed_graph_epochs: int = 200
    seed: int = 0
    runs: int = 10
    two_stage_t: int = 10
    zeta: int = 0
    ada_threshold: float = 0.9
    ada_rounds: int = 5
    workers: int = 1

    @property
    def resolved_p_kind(self):
        if self.p_kind is not None:
            return self.p_kind
        return "elu_plus_one" if self.generator == "fp" else "relu"

    def replace(self, **changes):
        return create_config(self, **changes)

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


CONFIG_FIELDS = {f.name: f for f in fields(ExperimentConfig)}


def _check(condition, message):
    if not condition:
        raise ConfigError(message)


def validate(config, grid=False):
    """Raise ConfigError for impossible values; with grid=True also enforce the tuning grids"""
    c = config
    _check(c.lam >= 0, f"lam must be >= 0, got {c.lam}")
    _check(0 <= c.r <= 100, f"r must be a percentage in [0, 100], got {c.r}")
    _check(c.eta >= 0, f"eta must be >= 0, got {c.eta}")
    _check(c.r * c.eta <= 100, f"r * eta must be <= 100, got {c.r * c.eta}")
    _check(c.noise is None or c.noise in NOISE_SCHEMES, f"noise must be one of {NOISE_SCHEMES}, got {c.noise}")
    _check(c.sigma >= 0, f"sigma must be >= 0, got {c.sigma}")
    _check(c.generator in GENERATORS, f"generator must be one of {GENERATORS}, got {c.generator}")
    _check(c.k >= 1, f"k must be >= 1, got {c.k}")
    _check(c.p_kind is None or c.p_kind in P_KINDS, f"p_kind must be one of {P_KINDS}, got {c.p_kind}")
    _check(c.sym_mode in SYM_MODES, f"sym_mode must be one of {SYM_MODES}, got {c.sym_mode}")
    _check(c.norm_mode in NORM_MODES, f"norm_mode must be one of {NORM_MODES}, got {c.norm_mode}")
    _check(c.mask_refresh in ("step", "epoch"), f"mask_refresh must be 'step' or 'epoch', got {c.mask_refresh}")
    _check(
        c.adj_dropout_position in ("after", "before"),
        f"adj_dropout_position must be 'after' or 'before', got {c.adj_dropout_position}",
    )
    _check(c.hidden_c >= 1 and c.hidden_dae >= 1, "hidden sizes must be >= 1")
    _check(c.layers >= 2, f"layers must be >= 2, got {c.layers}")
    for name in ("dropout_hidden", "dropout_c", "dropout_dae"):
        value = getattr(c, name)
        _check(0 <= value < 1, f"{name} must be in [0, 1), got {value}")
    _check(c.lr_c >= 0 and c.lr_dae >= 0, "learning rates must be >= 0")
    _check(c.weight_decay >= 0, f"weight_decay must be >= 0, got {c.weight_decay}")
    _check(c.max_epochs >= 1, f"max_epochs must be >= 1, got {c.max_epochs}")
    _check(c.eval_every >= 1, f"eval_every must be >= 1, got {c.eval_every}")
    _check(c.patience is None or c.patience >= 1, f"patience must be None or >= 1, got {c.patience}")
    _check(
        c.select_by is None or c.select_by in ("accuracy", "loss"),
        f"select_by must be None, 'accuracy' or 'loss', got {c.select_by}",
    )
    _check(c.fixed_graph_epochs >= 1, f"fixed_graph_epochs must be >= 1, got {c.fixed_graph_epochs}")
    _check(c.runs >= 1, f"runs must be >= 1, got {c.runs}")
    _check(c.two_stage_t >= 1, f"two_stage_t must be >= 1, got {c.two_stage_t}")
    _check(c.zeta >= 0, f"zeta must be >= 0, got {c.zeta}")
    _check(0 <= c.ada_threshold <= 1, f"ada_threshold must be in [0, 1], got {c.ada_threshold}")
    _check(c.ada_rounds >= 1, f"ada_rounds must be >= 1, got {c.ada_rounds}")
    _check(c.workers >= 1, f"workers must be >= 1, got {c.workers}")

    if grid:
        for key, values in TUNING_GRID.items():
            value = getattr(c, key)
            if key == "lam" and value == 0:
                continue
            if key == "zeta" and value == 0:
                continue
            _check(value in values, f"{key}={value} is not in the tuning grid {values}")

    return config


def coerce(name, value):
    """Convert a (string) value to the type of the config field `name`"""
    if name not in CONFIG_FIELDS:
        raise ConfigError(f"unknown config key '{name}'")
    default = CONFIG_FIELDS[name].default
    if not isinstance(value, str):
        return value
    text = value.strip()
    if text.lower() in ("none", "null", ""):
        return None
    if isinstance(default, bool):
        if text.lower() in ("1", "true", "yes", "on"):
            return True
        if text.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{name} expects a boolean, got '{value}'")
    try:
        if isinstance(default, int) or name == "patience":
            return int(text)
        if isinstance(default, float):
            return float(text)
    except ValueError as ex:
        raise ConfigError(f"{name} expects a number, got '{value}'") from ex
    return text


def tuned_values(name, generator):
    """Tuned hyperparameters of dataset `name` with `generator`"""
    key = (str(name).lower(), generator)
    if key not in TUNED:
        known = sorted({d for d, g in TUNED if g == generator})
        raise ConfigError(f"no tuned hyperparameters for '{name}' with generator '{generator}', known: {known}")
    return dict(TUNED[key])


def create_config(base=None, grid=False, tuned=None, **overrides):
    """Build a validated ExperimentConfig from the current defaults, an optional base config,
    the tuned hyperparameters of dataset `tuned` and overrides (applied in this order)"""
    values = {k: v for k, v in get_defaults().items() if k in CONFIG_FIELDS}
    if base is not None:
        if isinstance(base, ExperimentConfig):
            values.update(base.to_dict())
        else:
            values.update({k: coerce(k, v) for k, v in dict(base).items()})
    for k in overrides:
        if k not in CONFIG_FIELDS:
            raise ConfigError(f"unknown config key '{k}'")
    if tuned is not None:
        generator = coerce("generator", overrides.get("generator", values["generator"]))
        values.update(tuned_values(tuned, generator), generator=generator)
    for k, v in overrides.items():
        values[k] = coerce(k, v)
    return validate(ExperimentConfig(**values), grid=grid)


def get_defaults():
    return DEFAULTS.get_defaults()


def get_default(key, default_value=None):
    return DEFAULTS.get_default(key, default_value)


def set_defaults(**kwargs):
    DEFAULTS.set_defaults(**kwargs)


def reset_defaults():
    DEFAULTS.reset_defaults()


#
# per module argument views
#


def generator_args(config):
    return {"kind": config.generator, "k": config.k, "fp_floor": config.fp_floor, "p_kind": config.resolved_p_kind}


def processor_args(config):
    return {
        "p_kind": config.resolved_p_kind,
        "sym_mode": config.sym_mode,
        "norm_mode": config.norm_mode,
        "add_self_loops": config.add_self_loops,
    }


def classifier_args(config):
    return {"hidden": config.hidden_c, "layers": config.layers, "dropout": config.dropout_hidden}


def dae_args(config):
    return {"hidden": config.hidden_dae, "dropout": config.dropout_hidden}


def noise_args(config, feature_kind):
    scheme = config.noise
    if scheme is None:
        scheme = "binary" if feature_kind == "binary" else "zero"
    return {"scheme": scheme, "r": config.r, "eta": config.eta, "sigma": config.sigma}


DEFAULTS = Defaults()
