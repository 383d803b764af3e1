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

import json
import sys
import time
import warnings
from datetime import datetime
from time import localtime

import numpy as np


def mean_std(values):
    """Mean and population standard deviation, the way run summaries are reported"""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return float("nan"), float("nan")
    return float(values.mean()), float(values.std())


#
# Serialization helpers
#


class NumpyArrayEncoder(json.JSONEncoder):
    def default(self, o):  # pylint: disable=method-hidden
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return float(o)
        if isinstance(o, np.bool_):
            return bool(o)
        if isinstance(o, np.ndarray):
            return o.tolist()

        return super().default(o)


def _json_safe(obj):
    """NaN and infinities become None"""
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _json_safe(obj.tolist())
    if isinstance(obj, (float, np.floating)) and not np.isfinite(obj):
        return None
    return obj


def numpy_to_json(obj, indent=None):
    # sort_keys keeps report lines byte-identical across runs
    return json.dumps(_json_safe(obj), cls=NumpyArrayEncoder, indent=indent, sort_keys=True, allow_nan=False)


#
# Logging
#


def _verbosity():
    # imported late, defaults imports utils
    from .defaults import get_default  # pylint: disable=import-outside-toplevel

    return get_default("verbose", 1)


def _log(typ, level, *msg):
    if _verbosity() < level:
        return
    ts = datetime(*localtime()[:6]).isoformat()
    print(f"{ts} ({typ})", *msg, file=sys.stderr)


def info(*msg):
    _log("I", 1, *msg)


def debug(*msg):
    _log("D", 2, *msg)


def warn_log(*msg):
    _log("W", 0, *msg)


def error(*msg):
    _log("E", 0, *msg)


class Timer:
    def __init__(self, timeit, name, activity, level=0):
        if isinstance(timeit, bool):
            self.timeit = 99 if timeit else -1
        else:
            self.timeit = timeit
        self.activity = activity
        self.name = name
        self.level = level
        self.info = ""
        self.start = time.time()
        self.elapsed = 0.0

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_value, exc_traceback):
        self.elapsed = time.time() - self.start
        if self.level <= self.timeit:
            prefix = ""
            if self.level > 0:
                prefix += "| " * self.level

            name = f'"{self.name}"' if self.name != "" else ""

            print("%8.3f sec: %s%s %s %s" % (self.elapsed, prefix, self.activity, name, self.info), file=sys.stderr)


def warn(message, warning=RuntimeWarning, when="always"):
    def warning_on_one_line(
        message, category, filename, lineno, file=None, line=None
    ):  # pylint: disable=unused-argument
        return "%s: %s" % (category.__name__, message)

    warn_format = warnings.formatwarning
    warnings.formatwarning = warning_on_one_line
    with warnings.catch_warnings():
        warnings.simplefilter(when, warning)
        warnings.warn(message + "\n", warning, stacklevel=2)
    warnings.formatwarning = warn_format
