"""
Test configuration
"""
import os
import shutil
import tempfile

import numpy as np
import pytest

from app.graph import time_graph
from app.mgtn import AgentNetwork, init_params
from app.models.config import ArchitectureConfig
from tests.helpers import random_adjacency


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow end-to-end tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    """Fixed-seed generator for randomized checks"""
    return np.random.default_rng(20191001)


@pytest.fixture
def temp_dir():
    """Create a temporary directory for testing"""
    temp_dir = tempfile.mkdtemp()

    yield temp_dir

    # Cleanup
    shutil.rmtree(temp_dir)


@pytest.fixture
def carry_table_file(temp_dir):
    """Carry table over EUR, GBP and JPY with one zero-carry pair"""
    path = os.path.join(temp_dir, "carry.yaml")
    with open(path, "w") as f:
        f.write("EURGBP: {spot: 0.90, forward: 0.918}\n")
        f.write("EURJPY: {spot: 120.0, forward: 117.6}\n")
        f.write("GBPJPY: {spot: 133.0, forward: 133.0}\n")
    return path


@pytest.fixture
def small_architecture():
    """Reduced agent: J_1 = 3, TT ranks 2"""
    return ArchitectureConfig(
        extractor="fmgtn",
        hidden_features=3,
        tt_output_modes=[2, 2, 2],
        tt_ranks=[1, 2, 2, 1],
    )


@pytest.fixture
def small_agent(rng, small_architecture):
    """Initialized reduced fMGTN agent on 4 lags and 3 currencies"""
    net = AgentNetwork(small_architecture, (4, 4, 3), [time_graph(4), random_adjacency(rng, 3)])
    init_params(net, 7)
    return net


def small_run_config(temp_dir, carry_table_file, **overrides):
    """Run configuration document on three synthetic pairs, small enough for unit tests"""
    document = {
        "seed": 3,
        "target_pair": "EURUSD",
        "currencies": ["EUR", "GBP", "JPY"],
        "symbols": ["EURUSD", "GBPUSD", "USDJPY"],
        "carry_table": carry_table_file,
        "window": 4,
        "data": {"synthetic": {"kind": "momentum", "length": 60, "noise": 0.5}},
        "architecture": {
            "extractor": "fmgtn",
            "hidden_features": 3,
            "tt_output_modes": [2, 2, 2],
            "tt_ranks": [1, 2, 2, 1],
        },
        "train": {
            "episodes": 2,
            "batch_size": 8,
            "buffer_capacity": 200,
            "learning_rate": 0.001,
            "checkpoint_every": 1,
        },
        "output_dir": os.path.join(temp_dir, "runs"),
    }
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(document.get(key), dict):
            document[key] = {**document[key], **value}
        else:
            document[key] = value
    return document


@pytest.fixture
def run_config_document(temp_dir, carry_table_file):
    """Factory for small run configuration documents"""
    def factory(**overrides):
        return small_run_config(temp_dir, carry_table_file, **overrides)
    return factory
