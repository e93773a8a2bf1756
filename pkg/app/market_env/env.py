"""
Trading environment and chronological train/test split
"""
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from app.core.exceptions import EnvironmentTerminalError, InsufficientDataError, InvalidArgumentError
from app.core.logging import logger
from app.market_env.stream import ReturnTensorStream

BUY, SELL = 0, 1


class TradingEnv:
    """
    Episode over decisions ``start .. stop - 1`` of a stream

    Every action is a fresh one-minute directional bet on the target pair:
    Buy earns the next close log-return, Sell its negative. ``state_scale``
    multiplies states only; rewards stay raw log-returns.
    """

    def __init__(
        self,
        stream: ReturnTensorStream,
        start: int = 0,
        stop: Optional[int] = None,
        state_scale: float = 1.0,
    ):
        stop = len(stream) if stop is None else stop
        if not 0 <= start < stop <= len(stream):
            raise InvalidArgumentError(f"episode bounds [{start}, {stop}) invalid for {len(stream)} decisions")
        self.stream = stream
        self.start = start
        self.stop = stop
        self.state_scale = state_scale
        self._cursor = start

    @property
    def length(self) -> int:
        """Decisions per episode"""
        return self.stop - self.start

    @property
    def cursor(self) -> int:
        return self._cursor

    @property
    def is_terminal(self) -> bool:
        return self._cursor >= self.stop

    @property
    def first_state_time(self) -> pd.Timestamp:
        return self.stream.state_times[self.start]

    @property
    def last_state_time(self) -> pd.Timestamp:
        """Newest timestamp any state of this episode can observe"""
        return self.stream.state_times[self.stop]

    @property
    def reward_times(self) -> pd.DatetimeIndex:
        return self.stream.reward_times[self.start:self.stop]

    def _state(self, index: int) -> np.ndarray:
        if self.state_scale == 1.0:
            return self.stream.states[index]
        return self.stream.states[index] * self.state_scale

    def reset(self) -> np.ndarray:
        self._cursor = self.start
        return self._state(self._cursor)

    def step(self, action: int) -> Tuple[float, np.ndarray, bool]:
        """
        Take ``action`` in the current state

        Returns:
            (reward, next state, terminal)
        """
        if self.is_terminal:
            raise EnvironmentTerminalError("step called on a terminal environment; call reset() first")
        if action not in (BUY, SELL):
            raise InvalidArgumentError(f"action must be 0 (Buy) or 1 (Sell), got {action}")
        market_return = float(self.stream.rewards[self._cursor])
        reward = market_return if action == BUY else -market_return
        self._cursor += 1
        return reward, self._state(self._cursor), self.is_terminal


def split(
    stream: ReturnTensorStream,
    train_fraction: float,
    state_scale: float = 1.0,
) -> Tuple[TradingEnv, TradingEnv]:
    """
    Chronological train/test split

    The first ``round(train_fraction * return_rows)`` return rows form the
    training period. A decision belongs to training when its reward row is
    inside that period; every window that reaches the boundary, including
    the ones straddling it, belongs to the test environment.

    Raises:
        InsufficientDataError: if either side has no complete decision
    """
    if not 0.0 < train_fraction < 1.0:
        raise InvalidArgumentError(f"train fraction must lie in (0, 1), got {train_fraction}")
    boundary = round(train_fraction * stream.return_rows)
    train_decisions = boundary - stream.lags
    if train_decisions < 1 or train_decisions >= len(stream):
        raise InsufficientDataError(
            f"split at return row {boundary} of {stream.return_rows} leaves "
            f"{max(train_decisions, 0)} train and {len(stream) - max(train_decisions, 0)} test decisions "
            f"for a window of {stream.lags}"
        )
    train = TradingEnv(stream, 0, train_decisions, state_scale)
    test = TradingEnv(stream, train_decisions, len(stream), state_scale)
    logger.info(
        f"Split {len(stream)} decisions into {train.length} train and {test.length} test "
        f"at {stream.reward_times[train_decisions - 1]}"
    )
    return train, test
