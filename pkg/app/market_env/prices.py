"""
Price ingestion and log-returns

Prices are read from a long-format CSV with header exactly
``timestamp,symbol,open,high,low,close`` and aligned into a wide frame:
one row per timestamp, columns (symbol, feature) in the requested symbol
order and OHLC feature order.
"""
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np
import pandas as pd

from app.core.exceptions import DataValidationError, InsufficientDataError
from app.core.logging import logger
from app.models.market import FillReport

PRICE_COLUMNS: List[str] = ["timestamp", "symbol", "open", "high", "low", "close"]
FEATURES: List[str] = ["open", "high", "low", "close"]
TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%SZ"

PathLike = Union[str, Path]


@dataclass
class PriceSeries:
    """
    Timestamp-aligned OHLC prices

    ``frame`` is indexed by UTC timestamps; its columns are a
    (symbol, feature) MultiIndex.
    """
    frame: pd.DataFrame
    fill_report: FillReport

    @property
    def symbols(self) -> List[str]:
        return list(dict.fromkeys(self.frame.columns.get_level_values(0)))

    @property
    def timestamps(self) -> pd.DatetimeIndex:
        return self.frame.index

    def __len__(self) -> int:
        return len(self.frame)

    def to_long(self) -> pd.DataFrame:
        """Long-format frame with the CSV columns, rows grouped by timestamp"""
        parts = []
        for symbol in self.symbols:
            part = self.frame[symbol].reset_index(names="timestamp")
            part.insert(1, "symbol", symbol)
            parts.append(part)
        long = pd.concat(parts, ignore_index=True).sort_values("timestamp", kind="stable")
        long["timestamp"] = long["timestamp"].dt.strftime(TIMESTAMP_FORMAT)
        return long[PRICE_COLUMNS].reset_index(drop=True)


def wide_frame(long: pd.DataFrame, symbols: Sequence[str]) -> pd.DataFrame:
    """Pivot long rows to the (symbol, feature) layout, union of timestamps"""
    wide = long.pivot(index="timestamp", columns="symbol", values=FEATURES)
    wide = wide.swaplevel(0, 1, axis=1)
    columns = pd.MultiIndex.from_product([list(symbols), FEATURES], names=["symbol", "feature"])
    return wide.reindex(columns=columns).sort_index()


def _first_bad_row(mask: pd.Series) -> int:
    """CSV line number of the first flagged row (header is line 1)"""
    return int(mask.to_numpy().nonzero()[0][0]) + 2


def _parse(raw: pd.DataFrame, path: PathLike) -> pd.DataFrame:
    frame = pd.DataFrame()
    frame["timestamp"] = pd.to_datetime(raw["timestamp"], utc=True, errors="coerce", format="ISO8601")
    if frame["timestamp"].isna().any():
        bad = frame["timestamp"].isna()
        row = _first_bad_row(bad)
        raise DataValidationError(f"unparseable timestamp {raw['timestamp'].iloc[row - 2]!r} in {path}", row=row)

    frame["symbol"] = raw["symbol"].str.strip().str.upper()
    invalid_symbol = ~frame["symbol"].str.fullmatch(r"[A-Z]{6}")
    if invalid_symbol.any():
        row = _first_bad_row(invalid_symbol)
        raise DataValidationError(f"symbol {raw['symbol'].iloc[row - 2]!r} is not a 6-letter pair code", row=row)

    for feature in FEATURES:
        frame[feature] = pd.to_numeric(raw[feature], errors="coerce")
        unparseable = frame[feature].isna() | ~np.isfinite(frame[feature])
        if unparseable.any():
            row = _first_bad_row(unparseable)
            raise DataValidationError(f"unparseable {feature} value {raw[feature].iloc[row - 2]!r}", row=row)
    nonpositive = (frame[FEATURES] <= 0).any(axis=1)
    if nonpositive.any():
        row = _first_bad_row(nonpositive)
        raise DataValidationError(f"nonpositive price for {frame['symbol'].iloc[row - 2]}", row=row)

    for symbol, group in frame.groupby("symbol", sort=False):
        not_increasing = group["timestamp"].diff() <= pd.Timedelta(0)
        if not_increasing.any():
            row = int(group.index[not_increasing.to_numpy()][0]) + 2
            raise DataValidationError(f"timestamps of {symbol} are not strictly increasing", row=row)
    return frame


def align(long: pd.DataFrame, symbols: Sequence[str], max_fill_fraction: float = 0.05) -> PriceSeries:
    """
    Align per-symbol rows on the union of timestamps

    Rows before every symbol has data are trimmed; later gaps are
    forward-filled and counted.

    Raises:
        DataValidationError: if a symbol's filled share exceeds ``max_fill_fraction``
    """
    wide = wide_frame(long, symbols)
    first_seen = [wide[(symbol, "close")].first_valid_index() for symbol in symbols]
    start = max(first_seen)
    trimmed_rows = int((wide.index < start).sum())
    wide = wide.loc[start:]

    rows = len(wide)
    filled = {symbol: int(wide[(symbol, "close")].isna().sum()) for symbol in symbols}
    report = FillReport(
        rows=rows,
        trimmed_rows=trimmed_rows,
        filled=filled,
        fill_fraction={symbol: count / rows for symbol, count in filled.items()},
        max_fill_fraction=max_fill_fraction,
    )
    if report.total_filled:
        logger.warning(f"Forward-filled {report.total_filled} price rows: {filled}")
    if trimmed_rows:
        logger.warning(f"Dropped {trimmed_rows} leading rows before all symbols had prices")
    worst = max(report.fill_fraction.items(), key=lambda item: item[1])
    if worst[1] > max_fill_fraction:
        raise DataValidationError(
            f"{worst[0]}: {worst[1]:.2%} of rows forward-filled, above the {max_fill_fraction:.2%} limit"
        )
    return PriceSeries(frame=wide.ffill(), fill_report=report)


def load_prices(path: PathLike, symbols: Sequence[str], max_fill_fraction: float = 0.05) -> PriceSeries:
    """
    Load, validate and align a price CSV

    Args:
        path: CSV file
        symbols: Symbols to keep, in state order
        max_fill_fraction: Abort threshold for forward-filled rows

    Returns:
        Aligned series; its fill report counts the forward-filled rows
    """
    try:
        raw = pd.read_csv(path, dtype=str, keep_default_na=False)
    except FileNotFoundError:
        logger.error(f"Price file not found: {path}")
        raise
    except Exception as e:
        logger.error(f"Error reading price file {path}: {str(e)}")
        raise DataValidationError(f"cannot read {path}: {e}") from e

    if list(raw.columns) != PRICE_COLUMNS:
        raise DataValidationError(
            f"header of {path} must be exactly {','.join(PRICE_COLUMNS)}, got {','.join(raw.columns)}", row=1
        )
    if raw.empty:
        raise InsufficientDataError(f"{path} has no price rows")

    frame = _parse(raw, path)
    symbols = [symbol.upper() for symbol in symbols]
    present = set(frame["symbol"])
    missing = [symbol for symbol in symbols if symbol not in present]
    if missing:
        raise DataValidationError(f"{path} has no rows for symbol(s) {', '.join(missing)}")
    frame = frame[frame["symbol"].isin(symbols)]

    series = align(frame, symbols, max_fill_fraction)
    logger.info(f"Loaded {len(series)} aligned rows for {len(symbols)} symbols from {path}")
    return series


def log_returns(series: Union[PriceSeries, pd.DataFrame]) -> pd.DataFrame:
    """
    r_t = ln(p_t) - ln(p_{t-1}) per symbol and feature

    Each return row carries the timestamp of its later price.
    """
    prices = series.frame if isinstance(series, PriceSeries) else series
    if len(prices) < 2:
        raise InsufficientDataError(f"log-returns need at least 2 price rows, got {len(prices)}")
    return np.log(prices).diff().iloc[1:]
