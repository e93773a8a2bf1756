"""
Tests for run configuration, services and the command line
"""
import os
import re
from pathlib import Path

import pandas as pd
import pytest
from pydantic import ValidationError

from app.cli.commands import build_parser, main
from app.core.exceptions import CheckpointError, InvalidArgumentError
from app.market_env import load_prices
from app.mgtn import param_count, save_checkpoint
from app.models.config import RunConfig, TargetMode
from app.models.market import DEFAULT_SYMBOLS
from app.services.backtest import BacktestService
from app.services.inspection import InspectService
from app.services.run_setup import build_network
from app.services.training import TrainingService, apply_overrides
from app.utils.yaml_utils import load_yaml, save_yaml


def write_config(temp_dir, document, name="run.yaml"):
    path = os.path.join(temp_dir, name)
    save_yaml(document, path)
    return path


@pytest.fixture
def trained_run(temp_dir, run_config_document):
    """Config path and run directory of a finished two-episode run"""
    config_path = write_config(temp_dir, run_config_document())
    assert main(["train", "--config", config_path]) == 0
    return config_path, Path(temp_dir) / "runs" / "EURUSD-seed3"


class TestRunConfig:
    """Test run configuration validation"""

    def test_defaults(self, run_config_document):
        """Train seed follows the run seed"""
        config = RunConfig.from_document(run_config_document())
        assert config.train.seed == 3
        assert config.input_shape == (4, 4, 3)
        assert config.architecture.hidden_units == 8

    def test_default_file(self):
        """The shipped configuration validates"""
        root = Path(__file__).resolve().parents[1]
        document = load_yaml(str(root / "configs" / "default.yaml"))
        document["carry_table"] = str(root / "configs" / "carry_rates.yaml")
        config = RunConfig.from_document(document)
        assert config.input_shape == (4, 30, 9)

    @pytest.mark.parametrize("name", ["alternating.yaml", "momentum.yaml"])
    def test_learnability_files(self, name):
        """The learnability configurations validate on the nine default pairs"""
        root = Path(__file__).resolve().parents[1]
        document = load_yaml(str(root / "configs" / name))
        document["carry_table"] = str(root / "configs" / "carry_rates.yaml")
        config = RunConfig.from_document(document)
        assert config.input_shape == (4, 10, 9)
        assert config.train.state_scale == 1000.0

    def test_missing_carry_table(self, run_config_document, temp_dir):
        """A missing carry file names the field"""
        with pytest.raises(ValidationError, match="carry_table"):
            RunConfig.from_document(run_config_document(carry_table=os.path.join(temp_dir, "none.yaml")))

    def test_carry_optional_for_ttnn(self, run_config_document):
        """Only graph extractors need a carry table"""
        document = run_config_document(carry_table=None)
        with pytest.raises(ValidationError):
            RunConfig.from_document(document)
        document["architecture"]["extractor"] = "ttnn"
        assert RunConfig.from_document(document).carry_table is None

    def test_target_must_be_traded(self, run_config_document):
        """The target pair is one of the symbols"""
        with pytest.raises(ValidationError, match="target_pair"):
            RunConfig.from_document(run_config_document(target_pair="USDCHF"))

    def test_tt_shape(self, run_config_document):
        """TT ranks need unit boundaries"""
        with pytest.raises(ValidationError):
            RunConfig.from_document(run_config_document(architecture={"tt_ranks": [2, 2, 2, 1]}))

    def test_target_mode(self, run_config_document):
        """Both Bellman target names validate, others do not"""
        assert RunConfig.from_document(run_config_document()).train.target_mode == TargetMode.PAPER_LITERAL
        for name in ("paper-literal", "decoupled"):
            config = RunConfig.from_document(run_config_document(train={"target_mode": name}))
            assert config.train.target_mode.value == name
        with pytest.raises(ValidationError, match="target_mode"):
            RunConfig.from_document(run_config_document(train={"target_mode": "max"}))

    def test_overrides(self, run_config_document, temp_dir):
        """Overrides are re-validated and keep the train seed in sync"""
        config = RunConfig.from_document(run_config_document())
        updated = apply_overrides(config, {"seed": 11, "output_dir": os.path.join(temp_dir, "other")})
        assert updated.seed == 11
        assert updated.train.seed == 11
        assert apply_overrides(config, {}) is config


class TestSynthCommand:
    """Test the synth command"""

    def test_writes_prices(self, temp_dir):
        """The CSV loads back with every default pair"""
        out = os.path.join(temp_dir, "prices.csv")
        assert main(["synth", "--kind", "alternating", "--length", "20", "--seed", "1", "--out", out]) == 0
        series = load_prices(out, DEFAULT_SYMBOLS)
        assert len(series) == 20

    def test_invalid_length(self, temp_dir):
        """A single row is rejected as a validation error"""
        out = os.path.join(temp_dir, "prices.csv")
        assert main(["synth", "--kind", "momentum", "--length", "1", "--seed", "1", "--out", out]) == 1
        assert not os.path.exists(out)

    def test_unknown_kind(self, temp_dir):
        """Argument errors exit through argparse"""
        with pytest.raises(SystemExit) as excinfo:
            build_parser().parse_args(["synth", "--kind", "trend", "--length", "5", "--seed", "1", "--out", "x"])
        assert excinfo.value.code == 2


class TestInspectCommand:
    """Test the inspect command"""

    def test_carry_table(self, carry_table_file):
        """Zero-carry pairs have no edge"""
        summary = InspectService().inspect(Path(carry_table_file))
        assert "currencies: EUR, GBP, JPY" in summary
        assert "quoted pairs: 3" in summary
        assert "edges: 2" in summary
        assert main(["inspect", carry_table_file]) == 0

    def test_zero_carry_table(self, temp_dir):
        """A table without carry has an empty graph"""
        path = os.path.join(temp_dir, "flat.yaml")
        save_yaml({"EURGBP": {"spot": 0.9, "forward": 0.9}, "EURJPY": {"spot": 120.0, "forward": 120.0}}, path)
        assert "edges: 0" in InspectService().inspect(Path(path))

    def test_checkpoint_total(self, small_agent, temp_dir):
        """The listed total equals the parameter count"""
        path = save_checkpoint(small_agent, Path(temp_dir) / "agent.yaml")
        summary = InspectService().inspect(path)
        match = re.search(r"^total\s+(\d+)$", summary, re.MULTILINE)
        assert match is not None
        assert int(match.group(1)) == param_count(small_agent)
        assert "extractor: fmgtn" in summary

    def test_missing_file(self, temp_dir):
        """A missing path is a validation error"""
        assert main(["inspect", os.path.join(temp_dir, "absent.yaml")]) == 1


class TestTrainCommand:
    """Test the train command"""

    def test_run_directory(self, trained_run):
        """Every run artifact is written"""
        _, run_dir = trained_run

        # Check result
        for name in ("manifest.yaml", "episodes.csv", "training_curve.csv", "fill_report.yaml", "train.log"):
            assert (run_dir / name).is_file(), name
        for name in ("episode_0001.yaml", "episode_0002.yaml", "final.yaml"):
            assert (run_dir / "checkpoints" / name).is_file(), name
        episodes = pd.read_csv(run_dir / "episodes.csv")
        assert list(episodes["episode"]) == [1, 2]
        curve = pd.read_csv(run_dir / "training_curve.csv")
        assert "test_total_return_pct" in curve.columns

    def test_manifest(self, trained_run, run_config_document):
        """The manifest records seed, parameter count and checkpoints"""
        _, run_dir = trained_run
        manifest = load_yaml(str(run_dir / "manifest.yaml"))
        config = RunConfig.from_document(run_config_document())
        assert manifest["format"] == "mgtn-run-manifest"
        assert manifest["seed"] == 3
        assert manifest["param_count"] == param_count(build_network(config))
        assert manifest["checkpoints"][-1] == os.path.join("checkpoints", "final.yaml")
        assert len(manifest["episodes"]) == 2

    def test_manifest_rerun(self, trained_run, temp_dir):
        """Training from the manifest reproduces the episode log byte for byte"""
        _, run_dir = trained_run
        other = os.path.join(temp_dir, "rerun")
        assert main(["train", "--config", str(run_dir / "manifest.yaml"), "--out", other]) == 0
        rerun_dir = Path(other) / "EURUSD-seed3"
        assert (rerun_dir / "episodes.csv").read_bytes() == (run_dir / "episodes.csv").read_bytes()
        assert (rerun_dir / "checkpoints" / "final.yaml").read_bytes() == (
            run_dir / "checkpoints" / "final.yaml"
        ).read_bytes()

    def test_seed_override(self, temp_dir, run_config_document):
        """--seed names the run directory and lands in the manifest"""
        config_path = write_config(temp_dir, run_config_document(train={"episodes": 1}))
        assert main(["train", "--config", config_path, "--seed", "9"]) == 0
        manifest = load_yaml(os.path.join(temp_dir, "runs", "EURUSD-seed9", "manifest.yaml"))
        assert manifest["seed"] == 9
        assert manifest["overrides"] == {"seed": 9}

    def test_missing_carry_file(self, temp_dir, run_config_document):
        """Configuration errors exit with status 1"""
        document = run_config_document(carry_table=os.path.join(temp_dir, "missing.yaml"))
        assert main(["train", "--config", write_config(temp_dir, document)]) == 1

    def test_insufficient_data(self, temp_dir, run_config_document):
        """Too little history for the window is a validation error"""
        document = run_config_document(data={"synthetic": {"kind": "momentum", "length": 6}})
        assert main(["train", "--config", write_config(temp_dir, document)]) == 1

    def test_malformed_yaml(self, temp_dir):
        """A config that is not YAML is a validation error"""
        config_path = os.path.join(temp_dir, "broken.yaml")
        with open(config_path, "w") as f:
            f.write("seed: [3\ntarget_pair: EURUSD\n")
        assert main(["train", "--config", config_path]) == 1
        with pytest.raises(InvalidArgumentError, match="cannot parse config"):
            RunConfig.from_yaml(config_path)

    def test_service(self, temp_dir, run_config_document):
        """The service returns the run directory"""
        config = RunConfig.from_document(run_config_document(train={"episodes": 1, "checkpoint_every": 0}))
        run_dir = TrainingService().train(config)
        assert run_dir == Path(temp_dir) / "runs" / "EURUSD-seed3"
        assert sorted(p.name for p in (run_dir / "checkpoints").iterdir()) == ["final.yaml"]


class TestBacktestCommand:
    """Test the backtest command"""

    def test_backtest(self, trained_run):
        """Report and equity curve over the test split"""
        config_path, run_dir = trained_run
        checkpoint = run_dir / "checkpoints" / "final.yaml"
        before = checkpoint.read_bytes()
        assert main(["backtest", "--config", config_path, "--checkpoint", str(checkpoint)]) == 0

        # Check result
        report = load_yaml(str(run_dir / "backtest" / "report.yaml"))
        equity = pd.read_csv(run_dir / "backtest" / "equity.csv")
        assert len(equity) == report["steps"] + 1
        assert equity["equity"].iloc[0] == pytest.approx(1000.0)
        assert checkpoint.read_bytes() == before

    def test_repeatable(self, trained_run):
        """Two backtests give identical reports"""
        config_path, run_dir = trained_run
        config = RunConfig.from_yaml(config_path)
        checkpoint = run_dir / "checkpoints" / "final.yaml"
        first, _ = BacktestService().backtest(config, checkpoint)
        second, _ = BacktestService().backtest(config, checkpoint)
        assert first == second
        # 59 return rows, window 4, boundary at row 46
        assert first.steps == 13

    def test_incompatible_checkpoint(self, trained_run, temp_dir, run_config_document):
        """A checkpoint of another architecture exits with status 1"""
        _, run_dir = trained_run
        document = run_config_document(architecture={"hidden_features": 4})
        config_path = write_config(temp_dir, document, name="wide.yaml")
        checkpoint = str(run_dir / "checkpoints" / "final.yaml")
        assert main(["backtest", "--config", config_path, "--checkpoint", checkpoint]) == 1
        with pytest.raises(CheckpointError, match="hidden_features"):
            BacktestService().backtest(RunConfig.from_yaml(config_path), Path(checkpoint))

    def test_checkpoint_of_other_extractor(self, trained_run, temp_dir, run_config_document):
        """An fmgtn checkpoint cannot be backtested as a ttnn network"""
        _, run_dir = trained_run
        document = run_config_document(architecture={"extractor": "ttnn"})
        config_path = write_config(temp_dir, document, name="plain.yaml")
        checkpoint = str(run_dir / "checkpoints" / "final.yaml")
        assert main(["backtest", "--config", config_path, "--checkpoint", checkpoint]) == 1
        with pytest.raises(CheckpointError, match="extractor=fmgtn, network expects ttnn"):
            BacktestService().backtest(RunConfig.from_yaml(config_path), Path(checkpoint))
