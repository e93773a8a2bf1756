"""
Sliding-window state tensors
"""
from dataclasses import dataclass
from typing import List

import numpy as np
import pandas as pd

from app.core.exceptions import InsufficientDataError, InvalidArgumentError
from app.market_env.prices import FEATURES


@dataclass(frozen=True)
class ReturnTensorStream:
    """
    Ordered states with the target-pair close return that follows each one

    ``states[k]`` has shape (4, lags, n_symbols) and stacks return rows
    k, ..., k + lags - 1, oldest first. Decision k is taken in state k and
    earns ``rewards[k]``, the target close return of row k + lags. There is
    one state more than there are decisions: the last state has no
    following return and is terminal.
    """
    states: np.ndarray
    rewards: np.ndarray
    state_times: pd.DatetimeIndex
    reward_times: pd.DatetimeIndex
    symbols: List[str]
    target_pair: str
    lags: int

    def __len__(self) -> int:
        """Number of decisions"""
        return len(self.rewards)

    @property
    def return_rows(self) -> int:
        return len(self.rewards) + self.lags

    @property
    def terminal(self) -> np.ndarray:
        flags = np.zeros(len(self.states), dtype=bool)
        flags[-1] = True
        return flags


def build_stream(returns: pd.DataFrame, lags: int, target_pair: str) -> ReturnTensorStream:
    """
    Cut a return frame into window states

    Args:
        returns: Output of ``log_returns``: rows by timestamp, (symbol, feature) columns
        lags: I_1, return rows per state
        target_pair: Symbol whose close return is the reward

    Returns:
        Stream with ``len(returns) - lags`` decisions
    """
    if lags < 1:
        raise InvalidArgumentError(f"lags must be positive, got {lags}")
    symbols = list(dict.fromkeys(returns.columns.get_level_values(0)))
    target_pair = target_pair.upper()
    if target_pair not in symbols:
        raise InvalidArgumentError(f"target pair {target_pair} is not among {symbols}")
    rows = len(returns)
    if rows < lags + 1:
        raise InsufficientDataError(f"{rows} return rows; a window of {lags} lags needs at least {lags + 1}")

    ordered = returns.reindex(columns=pd.MultiIndex.from_product([symbols, FEATURES]))
    values = ordered.to_numpy(dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise InvalidArgumentError("returns contain non-finite entries")
    # (rows, symbols, features) -> (rows, features, symbols)
    table = values.reshape(rows, len(symbols), len(FEATURES)).transpose(0, 2, 1)
    windows = np.lib.stride_tricks.sliding_window_view(table, lags, axis=0)
    # sliding_window_view appends the window axis: (states, features, symbols, lags)
    states = np.ascontiguousarray(windows.transpose(0, 1, 3, 2))
    states.setflags(write=False)

    target_close = ordered[(target_pair, "close")].to_numpy(dtype=np.float64)
    rewards = target_close[lags:].copy()
    rewards.setflags(write=False)
    return ReturnTensorStream(
        states=states,
        rewards=rewards,
        state_times=returns.index[lags - 1:],
        reward_times=returns.index[lags:],
        symbols=symbols,
        target_pair=target_pair,
        lags=lags,
    )
