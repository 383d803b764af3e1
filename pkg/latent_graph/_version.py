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

from collections import namedtuple
from importlib import metadata
import re

VersionInfo = namedtuple("VersionInfo", ["major", "minor", "patch", "release", "build"])

# numeric stack whose versions change floating point results between installations
NUMERIC_STACK = ("numpy", "scipy", "scikit-learn", "networkx", "cachetools")


def get_version(version):
    r = re.compile(r"(?P<major>\d+)\.(?P<minor>\d+)\.(?P<patch>\d+)\-{0,1}(?P<release>\D*)(?P<build>\d*)")
    match = r.match(version)
    if match is None:
        raise ValueError(f"'{version}' is not a valid version string")
    return VersionInfo(*match.groups())


def stack_versions():
    result = {"latent-graph": __version__}
    for name in NUMERIC_STACK:
        try:
            result[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            result[name] = None
    return result


__version__ = "1.0.0"  # DO NOT EDIT THIS DIRECTLY!  It is managed by bumpversion
__version_info__ = get_version(__version__)
