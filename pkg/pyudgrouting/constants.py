#!/usr/bin/env python

"""
Constants
"""

from math import ceil, log2
from pathlib import Path

from platformdirs import user_data_dir

PACKAGE_NAME = "pyudgrouting"

# counterexample dumps and generated instances land here unless told otherwise
DATA_DIR = Path(user_data_dir(PACKAGE_NAME))
COUNTEREXAMPLES_DIR = DATA_DIR / "counterexamples"

GENERATOR_KINDS = [
    "uniform-square",
    "clustered-gaussian",
    "grid-perturbed",
    "snake",
    "line-path",
]

AVAILABLE_SCHEMES = [
    "hierarchical",
    "additive",
    "lowdiam",
    "tree",
    "spt",
]

VERIFY_COMPONENTS = [
    "graph",
    "tree",
    "lowdiam",
    "spanner",
    "cover",
    "decomposition",
    "additive",
    "hierarchical",
]

# harness limits
ALL_PAIRS_LIMIT = 512
DEFAULT_SAMPLE_PAIRS = 10_000
STEP_CAP_FACTOR = 16
GENERATION_RETRIES = 50

# soft bounds, exceeding them only logs a warning
OVERLAP_WARNING = 32
HEIGHT_WARNING_FACTOR = 2.0
PORTALS_WARNING_FACTOR = 16.0

# hard bounds
SPANNER_RATIO = 4.0
COVER_BETA = 4.0


def depth_limit(n: int) -> float:
    """
    Maximal decomposition height before the build is declared unbalanced: 4 log2 n + 8
    """
    return 4.0 * log2(max(n, 2)) + 8.0


def leaf_threshold(epsilon: float) -> int:
    """
    Regions with at most this many vertices become leaves: max(2, ceil(1/epsilon))
    """
    return max(2, ceil(1.0 / epsilon))


# calibration, see hierarchical.calibrate
LOWDIAM_STRETCH_CONSTANT = 64
CALIBRATION_MIN_TOTAL = 64
PAPER_BETA = 2**6
PAPER_BASE_KAPPA = 2**12
DEFAULT_KAPPA_THETA = 1.0
DEFAULT_KAPPA_ADDITIVE = 2.0

# acceptance budgets of the harness
KAPPA_THETA_BUDGET = 8.0
KAPPA_ADDITIVE_BUDGET = 16.0

# label store
LABEL_STORE_MAGIC = b"UDGL"
LABEL_STORE_VERSION = 1

STRETCH_SLACK = 1e-9

PARAMS_SCHEMA = {
    "epsilon_target": {
        "type": float,
        "description": "target stretch of the hierarchical scheme is 1 + epsilon_target, in (0, 1]",
        "options": None,
        "default": 1.0,
    },
    "epsilon": {
        "type": float,
        "description": "internal epsilon, bypasses the calibration when set (raw mode)",
        "options": None,
        "default": None,
    },
    "seed": {
        "type": int,
        "description": "seed of the instance generator",
        "options": None,
        "default": 0,
    },
    "port_seed": {
        "type": int,
        "description": "seed of the port permutation",
        "options": None,
        "default": 1,
    },
    "scheme": {
        "type": str,
        "description": "routing scheme to run",
        "options": AVAILABLE_SCHEMES,
        "default": "hierarchical",
    },
    "pairs": {
        "type": int,
        "description": "number of sampled pairs when n exceeds the all-pairs limit",
        "options": None,
        "default": DEFAULT_SAMPLE_PAIRS,
    },
    "all_pairs_limit": {
        "type": int,
        "description": "instances up to this size are simulated on all ordered pairs",
        "options": None,
        "default": ALL_PAIRS_LIMIT,
    },
    "pair_seed": {
        "type": int,
        "description": "seed of the pair sample",
        "options": None,
        "default": 0,
    },
    "suffix_checks": {
        "type": int,
        "description": "number of routes whose suffixes are re-routed from every intermediate vertex",
        "options": None,
        "default": 1000,
    },
    "dump_dir": {
        "type": str,
        "description": "where counterexamples are written, defaults to the user data directory",
        "options": None,
        "default": None,
    },
}
