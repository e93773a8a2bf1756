"""
Training runs
"""
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from app import __version__
from app.core.logging import add_run_log, logger
from app.metrics import EquityCurve, hit_rate, total_return
from app.mgtn import AgentNetwork, param_count, save_checkpoint
from app.models.config import RunConfig
from app.models.report import EpisodeReport, RunManifest
from app.rl_agent import DQNTrainer, greedy_rollout
from app.services.run_setup import RunData, build_network, prepare_data, run_directory
from app.utils.file_utils import ensure_directory, write_csv
from app.utils.version import code_version
from app.utils.yaml_utils import save_yaml


def apply_overrides(config: RunConfig, overrides: Dict[str, Any]) -> RunConfig:
    """Scalar command-line overrides, re-validated"""
    if not overrides:
        return config
    updated = config.model_copy(update=overrides)
    return RunConfig.model_validate(updated.model_dump())


def _greedy_summary(net: AgentNetwork, data: RunData) -> Dict[str, Optional[float]]:
    row: Dict[str, Optional[float]] = {}
    for name, env in (("train", data.train_env), ("test", data.test_env)):
        rewards = greedy_rollout(net, env)
        row[f"{name}_total_return_pct"] = total_return(EquityCurve(rewards))
        row[f"{name}_hit_rate_pct"] = hit_rate(rewards)
    return row


class TrainingService:
    """Service for training an agent from a run configuration"""

    def train(self, config: RunConfig, overrides: Optional[Dict[str, Any]] = None) -> Path:
        """
        Train and write the run directory

        Args:
            config: Validated run configuration
            overrides: Command-line overrides already applied to ``config``,
                recorded in the manifest

        Returns:
            Run directory holding manifest, metrics, checkpoints and log
        """
        run_dir = ensure_directory(run_directory(config))
        sink = add_run_log(str(run_dir / "train.log"))
        try:
            return self._train(config, overrides or {}, run_dir)
        except Exception as e:
            logger.error(f"Training run {run_dir} failed: {str(e)}")
            raise
        finally:
            logger.remove(sink)

    def _train(self, config: RunConfig, overrides: Dict[str, Any], run_dir: Path) -> Path:
        logger.info(f"Starting training run {run_dir} (seed {config.seed})")
        data = prepare_data(config)
        save_yaml(data.series.fill_report.model_dump(mode="json"), str(run_dir / "fill_report.yaml"))

        net = build_network(config)
        trainer = DQNTrainer(net, config.train, data.train_env.length)
        checkpoint_dir = run_dir / "checkpoints"
        checkpoints: List[str] = []
        curve: List[Dict[str, Any]] = []

        def on_episode_end(report: EpisodeReport) -> None:
            curve.append({"episode": report.episode, **_greedy_summary(net, data)})
            every = config.train.checkpoint_every
            if every and report.episode % every == 0:
                path = save_checkpoint(net, checkpoint_dir / f"episode_{report.episode:04d}.yaml")
                checkpoints.append(str(path.relative_to(run_dir)))

        reports = trainer.fit(data.train_env, on_episode_end)
        final = save_checkpoint(net, checkpoint_dir / "final.yaml")
        checkpoints.append(str(final.relative_to(run_dir)))

        write_csv(pd.DataFrame([report.model_dump() for report in reports]), run_dir / "episodes.csv")
        write_csv(pd.DataFrame(curve), run_dir / "training_curve.csv")
        manifest = RunManifest(
            package_version=__version__,
            code_version=code_version(),
            seed=config.seed,
            overrides=overrides,
            config=config.model_dump(mode="json"),
            param_count=param_count(net),
            episodes=reports,
            checkpoints=checkpoints,
        )
        save_yaml(manifest.model_dump(mode="json"), str(run_dir / "manifest.yaml"))
        logger.info(f"Training run finished: {len(reports)} episodes, {len(checkpoints)} checkpoints in {run_dir}")
        return run_dir
