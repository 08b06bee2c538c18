"""
Shared fixtures: the four-node pair G_a / G_b, the six-node two-leader
network and a seeded random generator.
"""
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from network.graph_core import build_graph

SAMPLES = Path(__file__).parent.parent / 'samples'

GA_EDGES = [('1', '2', 1), ('2', '3', 1), ('1', '4', -1), ('2', '4', -1), ('3', '4', -1)]
GB_EDGES = [('1', '2', 1), ('2', '3', -1), ('1', '4', -1), ('2', '4', -1), ('3', '4', -1)]
MIMO_EDGES = [
    ('1', '3', -1), ('1', '6', -1), ('2', '3', -1), ('2', '6', -1),
    ('3', '4', 1), ('6', '4', 1), ('1', '5', 1), ('2', '5', 1),
]


@pytest.fixture
def ga():
    return build_graph(['1', '2', '3', '4'], GA_EDGES)


@pytest.fixture
def gb():
    return build_graph(['1', '2', '3', '4'], GB_EDGES)


@pytest.fixture
def mimo():
    return build_graph(['1', '2', '3', '4', '5', '6'], MIMO_EDGES)


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


@pytest.fixture
def samples_dir():
    return SAMPLES
