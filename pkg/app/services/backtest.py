"""
Out-of-sample backtests
"""
from pathlib import Path
from typing import Tuple

from app.core.logging import logger
from app.metrics import EquityCurve, equity_frame, metric_report
from app.mgtn import load_checkpoint
from app.models.config import RunConfig
from app.models.report import MetricReport
from app.rl_agent import greedy_rollout
from app.services.run_setup import build_network, prepare_data, run_directory
from app.utils.file_utils import write_csv
from app.utils.yaml_utils import save_yaml


class BacktestService:
    """Service for greedy rollouts of a checkpoint over the test split"""

    def backtest(self, config: RunConfig, checkpoint: Path) -> Tuple[MetricReport, Path]:
        """
        Evaluate ``checkpoint`` on the test period of ``config``

        Parameters are loaded into a fresh network and never modified.

        Returns:
            (metric report, directory holding report.yaml and equity.csv)
        """
        data = prepare_data(config)
        net = build_network(config)
        load_checkpoint(net, checkpoint)

        env = data.test_env
        rewards = greedy_rollout(net, env)
        curve = EquityCurve(rewards, config.initial_capital)
        report = metric_report(curve, metadata={
            "checkpoint": str(checkpoint),
            "target_pair": config.target_pair,
            "seed": config.seed,
            "test_start": str(env.first_state_time),
            "test_end": str(env.reward_times[-1]),
        })

        out_dir = run_directory(config) / "backtest"
        save_yaml(report.model_dump(mode="json"), str(out_dir / "report.yaml"))
        timestamps = [env.first_state_time] + list(env.reward_times)
        write_csv(equity_frame(curve, timestamps), out_dir / "equity.csv")
        logger.info(
            f"Backtest over {report.steps} steps: total return {report.total_return_pct:.4f}%, "
            f"hit rate {report.hit_rate_pct}"
        )
        return report, out_dir
