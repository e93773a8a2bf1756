"""
Weighted adjacency matrices, normalization and the time graph
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.core.exceptions import GraphError, InvalidArgumentError


@dataclass(frozen=True, eq=False)
class Adjacency:
    """
    Weighted adjacency of a graph on ``n`` nodes

    Entries are finite and non-negative, zero meaning no edge. The diagonal
    is zero: self-influence enters through the identity in graph filters.
    """
    weights: np.ndarray
    labels: Optional[Tuple[str, ...]] = field(default=None)

    def __post_init__(self) -> None:
        weights = np.array(self.weights, dtype=np.float64)
        if weights.ndim != 2 or weights.shape[0] != weights.shape[1]:
            raise GraphError(f"adjacency must be square, got shape {weights.shape}")
        if not np.all(np.isfinite(weights)):
            raise GraphError("adjacency entries must be finite")
        if np.any(weights < 0):
            raise GraphError("adjacency entries must be non-negative")
        if np.any(np.diag(weights) != 0):
            raise GraphError("adjacency diagonal must be zero")
        if self.labels is not None and len(self.labels) != weights.shape[0]:
            raise GraphError(f"{len(self.labels)} labels for {weights.shape[0]} nodes")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @classmethod
    def empty(cls, n: int, labels: Optional[Sequence[str]] = None) -> "Adjacency":
        """Graph on ``n`` nodes without edges"""
        return cls(np.zeros((n, n)), tuple(labels) if labels is not None else None)

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.weights, self.weights.T))

    def edges(self, undirected: bool = False) -> List[Tuple[int, int, float]]:
        """
        Nonzero entries as (row, column, weight), row-major

        With ``undirected`` only the upper triangle is listed.
        """
        rows, cols = np.nonzero(self.weights)
        return [
            (int(i), int(j), float(self.weights[i, j]))
            for i, j in zip(rows, cols)
            if not undirected or i < j
        ]


def normalize(a: Adjacency) -> Adjacency:
    """
    Symmetric degree normalization D^{-1/2} A D^{-1/2}

    Degrees are row sums d_n = sum_m a_{n,m}.
    """
    degrees = a.weights.sum(axis=1)
    isolated = np.flatnonzero(degrees <= 0)
    if isolated.size:
        names = [a.labels[i] if a.labels else str(i) for i in isolated]
        raise GraphError(f"cannot normalize: zero-degree node(s) {', '.join(names)}")
    scale = 1.0 / np.sqrt(degrees)
    return Adjacency(scale[:, None] * a.weights * scale[None, :], a.labels)


def time_graph(t: int) -> Adjacency:
    """
    Directed path over ``t`` time steps, past to present

    a_{k, k-1} = 1 for k = 2..t, so a shift filter adds each step's
    predecessor into it.
    """
    if t < 1:
        raise InvalidArgumentError(f"time graph needs at least one step, got {t}")
    weights = np.zeros((t, t))
    steps = np.arange(1, t)
    weights[steps, steps - 1] = 1.0
    return Adjacency(weights)
