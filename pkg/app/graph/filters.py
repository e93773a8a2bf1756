"""
Graph filters: the shift filter (I + A) and the multi-linear filter
tensorize(I + (A ⊗ P))
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from app.core.config import settings
from app.core.exceptions import InvalidArgumentError, ShapeMismatchError
from app.graph.adjacency import Adjacency
from app.tensor_core import DenseTensor, contract, kron, matricize, mode_product, tensorize


class FilterKind(str, Enum):
    """Graph filter variants"""
    SHIFT = "shift"
    MULTILINEAR = "multilinear"


@dataclass(frozen=True, eq=False)
class GraphFilter:
    """
    Adjacency-derived filter

    A shift filter holds the (I x I) matrix I + A. A multi-linear filter
    holds the order-4 tensor of shape (J, I, J, I) whose matricization over
    modes (1, 2) is I + A ⊗ P.
    """
    kind: FilterKind
    shift: Optional[DenseTensor] = None
    multilinear: Optional[DenseTensor] = None

    @property
    def graph_size(self) -> int:
        if self.kind == FilterKind.SHIFT:
            return self.shift.shape[0]
        return self.multilinear.shape[1]

    def matricized(self) -> DenseTensor:
        """Filter as a square matrix"""
        if self.kind == FilterKind.SHIFT:
            return self.shift
        return matricize(self.multilinear, (1, 2))

    def apply(self, signal: DenseTensor, mode: int = 1) -> DenseTensor:
        """
        Filter a signal

        A shift filter multiplies (I + A) into ``mode`` of the signal. A
        multi-linear filter takes a (J, I) signal and contracts it against
        the filter's trailing (J, I) pair.
        """
        if self.kind == FilterKind.SHIFT:
            return mode_product(signal, self.shift, mode)
        if signal.shape != self.multilinear.shape[2:]:
            raise ShapeMismatchError(
                f"multi-linear filter expects a signal of shape {self.multilinear.shape[2:]}, got {signal.shape}"
            )
        return contract(self.multilinear, (3, 4), signal, (1, 2))


def shift_filter(a: Adjacency) -> GraphFilter:
    """Shift filter I + A: g_n = f_n + sum_m a_{n,m} f_m"""
    return GraphFilter(kind=FilterKind.SHIFT, shift=DenseTensor(np.eye(a.n) + a.weights))


def multilinear_filter(
    a: Adjacency,
    p: Union[DenseTensor, np.ndarray],
    max_dim: Optional[int] = None,
) -> GraphFilter:
    """
    Multi-linear graph filter tensorize(I + (A ⊗ P))

    Args:
        a: Graph adjacency (I x I)
        p: Feature propagation matrix (J x J)
        max_dim: Cap on J * I; defaults to ``settings.MAX_FILTER_DIM``

    Returns:
        Filter holding an order-4 tensor of shape (J, I, J, I)
    """
    p = p if isinstance(p, DenseTensor) else DenseTensor(p)
    if p.order != 2 or p.shape[0] != p.shape[1]:
        raise ShapeMismatchError(f"propagation matrix must be square, got shape {p.shape}")
    cap = settings.MAX_FILTER_DIM if max_dim is None else max_dim
    features, nodes = p.shape[0], a.n
    if features * nodes > cap:
        raise InvalidArgumentError(
            f"multi-linear filter dimension {features}*{nodes} exceeds the cap of {cap}"
        )
    coupled = kron(DenseTensor(a.weights), p)
    matrix = DenseTensor(np.eye(features * nodes) + coupled.array)
    return GraphFilter(
        kind=FilterKind.MULTILINEAR,
        multilinear=tensorize(matrix, (features, nodes, features, nodes), (1, 2)),
    )
