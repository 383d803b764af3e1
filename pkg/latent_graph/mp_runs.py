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

import multiprocessing

from .mp_run import call, run_one
from .trainer import run_seeds as run_seeds_sequential
from .utils import debug

pool = None
pool_size = 0


def init_pool(workers=None):
    global pool, pool_size  # pylint: disable=global-statement
    if workers is None:
        workers = max(1, int(multiprocessing.cpu_count() * 0.8))
    if pool is not None and pool_size != workers:
        close_pool()
    if pool is None:
        pool = multiprocessing.Pool(workers)
        pool_size = workers
        debug(f"started process pool with {workers} workers")


def close_pool():
    global pool, pool_size  # pylint: disable=global-statement
    if pool is None:
        return
    pool.close()
    pool.join()
    pool = None
    pool_size = 0


def map_ordered(fn, args, workers):
    """fn(*a) for every a in args, results in argument order"""
    if workers <= 1 or len(args) <= 1:
        return [fn(*a) for a in args]
    init_pool(min(workers, len(args)))
    try:
        results = [pool.apply_async(call, (fn, a)) for a in args]
        return [r.get() for r in results]
    finally:
        close_pool()


def run_seeds(operation, dataset, config, seeds, workers=1):
    """Independent runs of one experiment, in seed order whatever the worker count"""
    seeds = [int(s) for s in seeds]
    if workers <= 1 or len(seeds) <= 1:
        return run_seeds_sequential(operation, dataset, config, seeds)
    results = map_ordered(run_one, [(operation, dataset, config, s) for s in seeds], workers)
    return [report for _, report in results]
