"""
Command-line interface: train, backtest, synth and inspect
"""
import argparse
from pathlib import Path
from typing import Any, Dict, List, Optional

from rich.console import Console
from rich.table import Table

from app import __version__
from app.cli.error_handlers import EXIT_OK, handle_exception
from app.core.config import settings
from app.core.logging import logger
from app.models.config import RunConfig, SynthSpec
from app.models.market import SynthKind
from app.services.backtest import BacktestService
from app.services.inspection import InspectService
from app.services.synth import SynthService
from app.services.training import TrainingService, apply_overrides


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mgtn-agent", description=settings.PROJECT_NAME)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    train = commands.add_parser("train", help="Train an agent from a run configuration or manifest")
    train.add_argument("--config", type=Path, required=True, help="Run configuration (YAML) or run manifest")
    train.add_argument("--seed", type=int, help="Override the run seed")
    train.add_argument("--out", type=Path, help="Override the output directory")

    backtest = commands.add_parser("backtest", help="Greedy rollout of a checkpoint over the test split")
    backtest.add_argument("--config", type=Path, required=True, help="Run configuration (YAML) or run manifest")
    backtest.add_argument("--checkpoint", type=Path, required=True, help="Checkpoint file")

    synth = commands.add_parser("synth", help="Write a synthetic price CSV")
    synth.add_argument("--kind", choices=[kind.value for kind in SynthKind], required=True)
    synth.add_argument("--length", type=int, required=True, help="Price rows per symbol")
    synth.add_argument("--seed", type=int, required=True)
    synth.add_argument("--out", type=Path, required=True, help="Output CSV path")
    synth.add_argument("--noise", type=float, default=0.0, help="Per-slot noise in units of the move size")
    synth.add_argument("--magnitude", type=float, default=0.001, help="Log-size of one move")

    inspect = commands.add_parser("inspect", help="Summarise a checkpoint or a carry rate table")
    inspect.add_argument("path", type=Path)
    return parser


def cmd_train(args: argparse.Namespace, console: Console) -> Path:
    config = RunConfig.from_yaml(str(args.config))
    overrides: Dict[str, Any] = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["output_dir"] = str(args.out)
    config = apply_overrides(config, overrides)
    run_dir = TrainingService().train(config, overrides)
    console.print(str(run_dir), highlight=False)
    return run_dir


def cmd_backtest(args: argparse.Namespace, console: Console) -> Path:
    config = RunConfig.from_yaml(str(args.config))
    report, out_dir = BacktestService().backtest(config, args.checkpoint)

    table = Table(title=f"Backtest {config.target_pair}")
    table.add_column("metric")
    table.add_column("value", justify="right")
    for label, value in (
        ("total return %", report.total_return_pct),
        ("sharpe", report.sharpe),
        ("sortino", report.sortino),
        ("max drawdown %", report.max_drawdown_pct),
        ("hit rate %", report.hit_rate_pct),
    ):
        table.add_row(label, "undefined" if value is None else f"{value:.6g}")
    table.add_row("steps", str(report.steps))
    table.add_row("final equity", f"{report.final_equity:.2f}")
    console.print(table)
    console.print(str(out_dir), highlight=False)
    return out_dir


def cmd_synth(args: argparse.Namespace, console: Console) -> Path:
    spec = SynthSpec(kind=args.kind, length=args.length, seed=args.seed, noise=args.noise, magnitude=args.magnitude)
    out = SynthService().synth(spec, args.seed, args.out)
    console.print(str(out), highlight=False)
    return out


def cmd_inspect(args: argparse.Namespace, console: Console) -> str:
    summary = InspectService().inspect(args.path)
    console.print(summary, markup=False, highlight=False, end="")
    return summary


COMMANDS = {
    "train": cmd_train,
    "backtest": cmd_backtest,
    "synth": cmd_synth,
    "inspect": cmd_inspect,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one command

    Returns:
        0 on success, 1 for validation errors, 2 for runtime errors
    """
    args = build_parser().parse_args(argv)
    console = Console(soft_wrap=True)
    try:
        COMMANDS[args.command](args, console)
        return EXIT_OK
    except Exception as e:
        return handle_exception(e, Console(stderr=True, soft_wrap=True))
    finally:
        logger.debug(f"Command {args.command} finished")
