"""
Experience replay
"""
from dataclasses import dataclass
from enum import IntEnum
from typing import List, Optional

import numpy as np

from app.core.exceptions import InsufficientDataError, InvalidArgumentError


class Action(IntEnum):
    """Agent action; the index of its Q-value"""
    BUY = 0
    SELL = 1


@dataclass(frozen=True)
class Experience:
    """One (s, a, r, s', terminal) transition"""
    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray
    terminal: bool

    def __post_init__(self) -> None:
        if self.action not in (Action.BUY, Action.SELL):
            raise InvalidArgumentError(f"action must be 0 (Buy) or 1 (Sell), got {self.action}")
        if not np.isfinite(self.reward):
            raise InvalidArgumentError(f"reward must be finite, got {self.reward}")
        if self.state.shape != self.next_state.shape:
            raise InvalidArgumentError(
                f"state shape {self.state.shape} differs from next state shape {self.next_state.shape}"
            )


@dataclass
class Batch:
    """Stacked transitions"""
    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_states: np.ndarray
    terminals: np.ndarray

    def __len__(self) -> int:
        return len(self.actions)

    @classmethod
    def from_experiences(cls, experiences: List[Experience]) -> "Batch":
        if not experiences:
            raise InsufficientDataError("cannot build an empty batch")
        return cls(
            states=np.stack([e.state for e in experiences]),
            actions=np.array([int(e.action) for e in experiences], dtype=np.int64),
            rewards=np.array([e.reward for e in experiences], dtype=np.float64),
            next_states=np.stack([e.next_state for e in experiences]),
            terminals=np.array([e.terminal for e in experiences], dtype=bool),
        )


class ReplayBuffer:
    """
    Fixed-capacity ring buffer of experiences

    Once full, each push overwrites the oldest entry. Sampling is uniform
    without replacement within a batch and reproducible for a given
    generator.
    """

    def __init__(self, capacity: int, rng: Optional[np.random.Generator] = None):
        if capacity < 1:
            raise InvalidArgumentError(f"replay capacity must be positive, got {capacity}")
        self.capacity = capacity
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self._storage: List[Experience] = []
        self._next = 0

    def __len__(self) -> int:
        return len(self._storage)

    def push(self, experience: Experience) -> None:
        if len(self._storage) < self.capacity:
            self._storage.append(experience)
        else:
            self._storage[self._next] = experience
        self._next = (self._next + 1) % self.capacity

    def sample(self, batch_size: int) -> Batch:
        if batch_size < 1:
            raise InvalidArgumentError(f"batch size must be positive, got {batch_size}")
        if batch_size > len(self._storage):
            raise InsufficientDataError(
                f"replay buffer holds {len(self._storage)} experiences, batch needs {batch_size}"
            )
        indices = self.rng.choice(len(self._storage), size=batch_size, replace=False)
        return Batch.from_experiences([self._storage[i] for i in indices])
