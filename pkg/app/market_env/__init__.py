"""
FOREX data, window states and the trading environment
"""
from app.market_env.env import BUY, SELL, TradingEnv, split
from app.market_env.prices import (
    FEATURES,
    PRICE_COLUMNS,
    PriceSeries,
    align,
    load_prices,
    log_returns,
)
from app.market_env.stream import ReturnTensorStream, build_stream
from app.market_env.synthetic import move_signs, synth_series

__all__ = [
    "BUY",
    "FEATURES",
    "PRICE_COLUMNS",
    "PriceSeries",
    "ReturnTensorStream",
    "SELL",
    "TradingEnv",
    "align",
    "build_stream",
    "load_prices",
    "log_returns",
    "move_signs",
    "split",
    "synth_series",
]
