"""
Shared construction steps of the train and backtest commands
"""
from dataclasses import dataclass
from pathlib import Path
from typing import List

from app.core.logging import logger
from app.graph import Adjacency, carry_graph, load_carry_table, normalize, time_graph
from app.market_env import (
    PriceSeries,
    ReturnTensorStream,
    TradingEnv,
    build_stream,
    load_prices,
    log_returns,
    split,
    synth_series,
)
from app.mgtn import AgentNetwork
from app.models.config import RunConfig


@dataclass
class RunData:
    """Prices, stream and the two environments of a run"""
    series: PriceSeries
    stream: ReturnTensorStream
    train_env: TradingEnv
    test_env: TradingEnv


def run_directory(config: RunConfig) -> Path:
    return Path(config.output_dir) / f"{config.target_pair}-seed{config.seed}"


def load_series(config: RunConfig) -> PriceSeries:
    """Prices from the configured CSV or synthetic generator"""
    source = config.data
    if source.csv_path is not None:
        return load_prices(source.csv_path, config.symbols, source.max_fill_fraction)
    spec = source.synthetic
    seed = config.seed if spec.seed is None else spec.seed
    logger.info(f"Generating {spec.length} synthetic {spec.kind.value} rows with seed {seed}")
    return synth_series(
        spec.kind,
        spec.length,
        seed,
        noise=spec.noise,
        magnitude=spec.magnitude,
        persistence=spec.persistence,
        symbols=config.symbols,
        start=spec.start,
    )


def prepare_data(config: RunConfig) -> RunData:
    series = load_series(config)
    stream = build_stream(log_returns(series), config.window, config.target_pair)
    train_env, test_env = split(stream, config.train.train_fraction, config.train.state_scale)
    return RunData(series=series, stream=stream, train_env=train_env, test_env=test_env)


def build_graphs(config: RunConfig) -> List[Adjacency]:
    """
    Lag graph over the window and carry graph over the currencies

    Without a carry table (``ttnn`` runs) the currency graph has no edges.
    """
    lag_graph = time_graph(config.window)
    if config.carry_table is None:
        return [lag_graph, Adjacency.empty(len(config.currencies), config.currencies)]
    rates = load_carry_table(str(config.carry_table))
    currency_graph = carry_graph(rates, config.currencies, rescale=config.rescale_carry)
    if config.normalize_carry:
        currency_graph = normalize(currency_graph)
    return [lag_graph, currency_graph]


def build_network(config: RunConfig) -> AgentNetwork:
    return AgentNetwork(config.architecture, config.input_shape, build_graphs(config))
