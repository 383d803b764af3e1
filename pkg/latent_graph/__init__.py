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

from ._version import __version_info__ as lgl_version_info, __version__ as lgl_version, stack_versions

from .defaults import (
    ConfigError,
    ExperimentConfig,
    create_config,
    get_default,
    get_defaults,
    set_defaults,
    reset_defaults,
)

from .numerics import SparseGraph
from .datasets import Dataset, DatasetError, generate_planted, load_builtin, load_dataset
from .generators import knn_graph
from .adjacency import process

from .trainer import (
    TrainReport,
    TrainingDivergedError,
    ada_edge,
    grid_search,
    gradient_check,
    self_training,
    summarize,
    train_fixed_graph,
    train_knn_gcn,
    train_mlp,
    train_slaps,
    train_two_stage,
)

from .graph_analysis import (
    AnalysisError,
    count_starved_edges,
    edge_homophily_ratio,
    homophily_odds,
    learned_support,
    perturb_graph,
    recovery_metrics,
    starved_prob_er,
    starved_prob_monte_carlo,
    starved_prob_sf,
)

from .utils import warn


def versions():
    print()
    print("Versions:")
    for name, version in stack_versions().items():
        print(f"- {name:<14}", version or "not installed")
    print()
