"""Code to be distributed by multiprocessing, hence a separate file"""

from .trainer import OPERATIONS, dataset_for


def run_one(operation, dataset, config, seed):
    """One training run; this function will be pickled by multiprocessing"""
    report = OPERATIONS[operation](dataset_for(dataset, seed), config.replace(seed=int(seed)))
    return seed, report


def call(fn, args):
    return fn(*args)
