"""
Synthetic OHLC generators for tests and demos
"""
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from app.core.exceptions import InvalidArgumentError
from app.market_env.prices import FEATURES, PriceSeries
from app.models.market import DEFAULT_SYMBOLS, FillReport, SynthKind

# high/low sit this many move magnitudes beyond the open/close range
WICK = 0.25


def move_signs(kind: SynthKind, moves: int, rng: np.random.Generator, persistence: float = 0.9) -> np.ndarray:
    """
    Sign of every base move

    alternating: +1, -1, +1, ...; momentum: each sign repeats the previous
    one with probability ``persistence``; random-walk: i.i.d. fair signs.
    """
    kind = SynthKind(kind)
    if kind == SynthKind.ALTERNATING:
        return np.where(np.arange(moves) % 2 == 0, 1.0, -1.0)
    if kind == SynthKind.RANDOM_WALK:
        return rng.choice([-1.0, 1.0], size=moves)
    signs = np.empty(moves)
    signs[0] = rng.choice([-1.0, 1.0])
    flips = rng.random(moves) >= persistence
    for t in range(1, moves):
        signs[t] = -signs[t - 1] if flips[t] else signs[t - 1]
    return signs


def synth_series(
    kind: SynthKind,
    length: int,
    seed: int,
    noise: float = 0.0,
    magnitude: float = 0.001,
    persistence: float = 0.9,
    symbols: Optional[Sequence[str]] = None,
    start: str = "2019-10-01T00:00:00Z",
) -> PriceSeries:
    """
    Deterministic synthetic minute prices for every symbol

    All symbols share the base move sequence; each adds its own Gaussian
    noise of scale ``noise * magnitude`` to every close log-return. Opens
    equal the previous close.

    Args:
        kind: Move process
        length: Price rows per symbol
        seed: Generator seed
        noise: Noise scale in units of ``magnitude``
        magnitude: Log-size of a base move
        persistence: Sign persistence of the momentum process
        symbols: Pair slots; the nine default pairs when omitted
        start: First timestamp (UTC)

    Returns:
        Aligned series with an empty fill report
    """
    if length < 2:
        raise InvalidArgumentError(f"synthetic series needs at least 2 rows, got {length}")
    if noise < 0 or magnitude <= 0:
        raise InvalidArgumentError("noise must be non-negative and magnitude positive")
    symbols = [s.upper() for s in (symbols or DEFAULT_SYMBOLS)]
    rng = np.random.default_rng(seed)
    base = magnitude * move_signs(kind, length - 1, rng, persistence)

    timestamps = pd.date_range(pd.Timestamp(start), periods=length, freq="min", name="timestamp")
    columns = {}
    for symbol in symbols:
        moves = base + noise * magnitude * rng.standard_normal(length - 1) if noise > 0 else base
        log_close = np.concatenate([[0.0], np.cumsum(moves)])
        close = np.exp(log_close)
        open_ = np.concatenate([[close[0]], close[:-1]])
        columns[(symbol, "open")] = open_
        columns[(symbol, "high")] = np.maximum(open_, close) * np.exp(WICK * magnitude)
        columns[(symbol, "low")] = np.minimum(open_, close) * np.exp(-WICK * magnitude)
        columns[(symbol, "close")] = close

    frame = pd.DataFrame(columns, index=timestamps)
    frame.columns = pd.MultiIndex.from_product([symbols, FEATURES], names=["symbol", "feature"])
    report = FillReport(
        rows=length,
        filled={symbol: 0 for symbol in symbols},
        fill_fraction={symbol: 0.0 for symbol in symbols},
        max_fill_fraction=0.0,
    )
    return PriceSeries(frame=frame, fill_report=report)
