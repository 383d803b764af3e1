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

"""Text formats for datasets, configs and reports, and pickled training results"""

import json
import os
import pickle
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Optional

import numpy as np

from .datasets import DatasetError, manifest_from_dict
from .defaults import ConfigError, ExperimentConfig, create_config
from .utils import numpy_to_json


#
# key = value files
#


def read_keyvalue(path, error=ValueError):
    values = {}
    with open(path, "r", encoding="utf-8") as fd:
        for no, line in enumerate(fd, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise error(f"{path}:{no}: expected 'key = value', got '{line}'")
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
    return values


def write_keyvalue(path, values):
    with open(path, "w", encoding="utf-8") as fd:
        for key, value in values.items():
            fd.write(f"{key} = {_format_value(value)}\n")


def _format_value(value):
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def read_config(path, **overrides):
    """ExperimentConfig from a key = value file; keyword overrides win over file values"""
    if not os.path.exists(path):
        raise ConfigError(f"config file '{path}' does not exist")
    return create_config(read_keyvalue(path, ConfigError), **overrides)


def write_config(config, path):
    write_keyvalue(path, config.to_dict())


def read_manifest(path):
    if not os.path.exists(path):
        raise DatasetError(f"manifest '{path}' does not exist")
    return manifest_from_dict(read_keyvalue(path, DatasetError), root=os.path.dirname(os.path.abspath(path)))


#
# Datasets
#


def save_dataset(dataset, directory, name=None):
    """Write features, labels, splits, edges and a manifest; returns the manifest path"""
    name = name or dataset.name
    os.makedirs(directory, exist_ok=True)

    def target(suffix):
        return os.path.join(directory, f"{name}.{suffix}")

    np.savetxt(target("features"), dataset.X, fmt="%.17g")
    np.savetxt(target("labels"), dataset.y, fmt="%d")
    with open(target("splits"), "w", encoding="utf-8") as fd:
        for split in ("train", "val", "test"):
            for node in getattr(dataset, split):
                fd.write(f"{node} {split}\n")

    manifest = {
        "name": name,
        "features": f"{name}.features",
        "labels": f"{name}.labels",
        "splits": f"{name}.splits",
        "feature_kind": dataset.feature_kind,
        "standardize": False,
        "select_by": dataset.select_by,
    }
    if dataset.graph is not None:
        write_edges(dataset.graph, target("edges"))
        manifest["edges"] = f"{name}.edges"

    path = target("manifest")
    write_keyvalue(path, manifest)
    return path


def write_edges(graph, path):
    with open(path, "w", encoding="utf-8") as fd:
        for r, c, w in graph.entries:
            fd.write(f"{r} {c} {w!r}\n")


#
# Reports
#


@dataclass
class ReportRecord:
    experiment: str
    seed: Optional[int]
    metric: str
    value: object
    config: dict = field(default_factory=dict)
    timestamp: Optional[str] = None

    def to_json(self):
        return numpy_to_json(asdict(self))


def records_from_metrics(experiment, seed, metrics, config=None, stamp=False):
    timestamp = datetime.now(timezone.utc).isoformat() if stamp else None
    snapshot = config.to_dict() if isinstance(config, ExperimentConfig) else dict(config or {})
    return [ReportRecord(experiment, seed, k, v, snapshot, timestamp) for k, v in metrics.items()]


class ReportWriter:
    """Single appender of line-delimited JSON records to a file (or stdout for path None / '-')"""

    def __init__(self, path=None):
        self.path = path
        self.fd = None

    def __enter__(self):
        if self.path in (None, "-"):
            self.fd = sys.stdout
        else:
            self.fd = open(self.path, "a", encoding="utf-8")  # pylint: disable=consider-using-with
        return self

    def __exit__(self, exc_type, exc_value, exc_traceback):
        if self.fd is not sys.stdout:
            self.fd.close()
        self.fd = None

    def append(self, record):
        self.fd.write(record.to_json() + "\n")
        self.fd.flush()

    def extend(self, records):
        for record in records:
            self.append(record)


def read_reports(path):
    with open(path, "r", encoding="utf-8") as fd:
        return [json.loads(line) for line in fd if line.strip()]


#
# Pickled results
#


def save_binary(obj, filename, metadata=None):
    with open(filename, "wb") as fd:
        pickle.dump({"type": type(obj).__name__, "obj": obj, "metadata": metadata}, fd)


def load_binary(filename):
    with open(filename, "rb") as fd:
        data = pickle.load(fd)
    return data["obj"], data["metadata"]
