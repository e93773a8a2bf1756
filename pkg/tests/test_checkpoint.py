"""
Tests for parameter checkpoints
"""
import os

import numpy as np
import pytest
import yaml

from app.core.exceptions import CheckpointError
from app.graph import time_graph
from app.mgtn import AgentNetwork, init_params, load_checkpoint, read_checkpoint, save_checkpoint
from app.models.config import ArchitectureConfig
from tests.helpers import random_adjacency


class TestCheckpoint:
    """Test checkpoint save and load"""

    def test_round_trip(self, small_agent, temp_dir):
        """Loaded parameters are bit-identical"""
        path = save_checkpoint(small_agent, os.path.join(temp_dir, "model.yaml"))
        fresh = small_agent.copy()
        init_params(fresh, 99)
        load_checkpoint(fresh, path)
        for name, array in small_agent.params.items():
            np.testing.assert_array_equal(fresh.params[name], array)

    def test_byte_stable(self, small_agent, temp_dir):
        """Identical parameters give identical files"""
        first = save_checkpoint(small_agent, os.path.join(temp_dir, "a.yaml"))
        second = save_checkpoint(small_agent.copy(), os.path.join(temp_dir, "b.yaml"))
        with open(first, "rb") as f, open(second, "rb") as g:
            assert f.read() == g.read()

    def test_read_architecture(self, small_agent, temp_dir):
        """The architecture section restores the network layout"""
        path = save_checkpoint(small_agent, os.path.join(temp_dir, "model.yaml"))
        architecture, input_shape, arrays = read_checkpoint(path)
        assert architecture == small_agent.architecture
        assert input_shape == (4, 4, 3)
        assert list(arrays) == list(small_agent.params)

    def test_incompatible_network(self, small_agent, temp_dir, rng):
        """An architecture mismatch names the differing field"""
        path = save_checkpoint(small_agent, os.path.join(temp_dir, "model.yaml"))
        wider = AgentNetwork(
            ArchitectureConfig(hidden_features=5, tt_output_modes=[2, 2, 2], tt_ranks=[1, 2, 2, 1]),
            (4, 4, 3),
            [time_graph(4), random_adjacency(rng, 3)],
        )
        with pytest.raises(CheckpointError, match="hidden_features=3, network expects 5"):
            load_checkpoint(wider, path)

        plain = AgentNetwork(
            ArchitectureConfig(extractor="ttnn", hidden_features=3, tt_output_modes=[2, 2, 2], tt_ranks=[1, 2, 2, 1]),
            (4, 4, 3),
            [time_graph(4), random_adjacency(rng, 3)],
        )
        with pytest.raises(CheckpointError, match="extractor=fmgtn, network expects ttnn"):
            load_checkpoint(plain, path)

    def test_input_shape_mismatch(self, small_agent, temp_dir, rng):
        """A network over other lags rejects the checkpoint"""
        path = save_checkpoint(small_agent, os.path.join(temp_dir, "model.yaml"))
        longer = AgentNetwork(small_agent.architecture, (4, 5, 3), [time_graph(5), random_adjacency(rng, 3)])
        with pytest.raises(CheckpointError, match="input_shape"):
            load_checkpoint(longer, path)

    def test_array_shape_mismatch(self, small_agent, temp_dir):
        """A reshaped array is named"""
        path = save_checkpoint(small_agent, os.path.join(temp_dir, "model.yaml"))
        with open(path) as f:
            document = yaml.safe_load(f)
        entry = next(p for p in document["parameters"] if p["name"] == "extractor.weight")
        entry["shape"] = entry["shape"][::-1]
        with open(path, "w") as f:
            yaml.safe_dump(document, f)
        with pytest.raises(CheckpointError, match="extractor.weight"):
            load_checkpoint(small_agent, path)

    def test_missing_and_unexpected_arrays(self, small_agent, temp_dir):
        """Missing and extra arrays are named"""
        path = save_checkpoint(small_agent, os.path.join(temp_dir, "model.yaml"))
        with open(path) as f:
            document = yaml.safe_load(f)

        missing = dict(document, parameters=[p for p in document["parameters"] if p["name"] != "hidden.bias"])
        missing_path = os.path.join(temp_dir, "missing.yaml")
        with open(missing_path, "w") as f:
            yaml.safe_dump(missing, f)
        with pytest.raises(CheckpointError, match="hidden.bias"):
            load_checkpoint(small_agent, missing_path)

        extra = dict(document, parameters=document["parameters"] + [{"name": "extra.weight", "shape": [1], "data": [0.0]}])
        extra_path = os.path.join(temp_dir, "extra.yaml")
        with open(extra_path, "w") as f:
            yaml.safe_dump(extra, f)
        with pytest.raises(CheckpointError, match="extra.weight"):
            load_checkpoint(small_agent, extra_path)

    def test_format_and_version(self, small_agent, temp_dir):
        """Foreign documents and other versions are rejected"""
        path = os.path.join(temp_dir, "other.yaml")
        with open(path, "w") as f:
            yaml.safe_dump({"format": "something-else"}, f)
        with pytest.raises(CheckpointError):
            read_checkpoint(path)

        saved = save_checkpoint(small_agent, os.path.join(temp_dir, "model.yaml"))
        with open(saved) as f:
            document = yaml.safe_load(f)
        document["version"] = 99
        with open(path, "w") as f:
            yaml.safe_dump(document, f)
        with pytest.raises(CheckpointError, match="version"):
            read_checkpoint(path)

    def test_data_length(self, small_agent, temp_dir):
        """Flat data must fill the declared shape"""
        saved = save_checkpoint(small_agent, os.path.join(temp_dir, "model.yaml"))
        with open(saved) as f:
            document = yaml.safe_load(f)
        document["parameters"][0]["data"] = document["parameters"][0]["data"][:-1]
        path = os.path.join(temp_dir, "short.yaml")
        with open(path, "w") as f:
            yaml.safe_dump(document, f)
        with pytest.raises(CheckpointError, match="extractor.weight"):
            read_checkpoint(path)

    def test_missing_file(self, small_agent, temp_dir):
        """A missing checkpoint raises FileNotFoundError"""
        with pytest.raises(FileNotFoundError):
            load_checkpoint(small_agent, os.path.join(temp_dir, "absent.yaml"))
