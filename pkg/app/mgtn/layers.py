"""
Multi-graph tensor network layers

gMGTN: for each graph domain m, a feature transform W^(m) followed by the
multi-linear filter tensorize(I + A^(m) ⊗ P^(m)), activation last.
fMGTN: one feature transform W followed by the shift filters (I + A^(m))
along each graph mode, activation last.

Single-sample ``*_forward`` functions evaluate the contraction chains on
DenseTensors. The ``*_batch`` functions are the array kernels the agent
network trains with; they apply the same operators with a leading batch
axis and use the Kronecker structure of the multi-linear filter,
F ×(u) = u + P ×_feat (A ×_graph u), instead of materializing it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Sequence, Tuple

import numpy as np

from app.core.exceptions import ShapeMismatchError
from app.graph import Adjacency, GraphFilter, multilinear_filter, shift_filter
from app.tensor_core import DenseTensor, contract, mode_dot, mode_product


class Activation(str, Enum):
    """Layer activation"""
    RELU = "relu"
    IDENTITY = "identity"


def activate(z: np.ndarray, activation: Activation) -> np.ndarray:
    if activation == Activation.RELU:
        return np.maximum(z, 0.0)
    return z


def activation_backward(z: np.ndarray, upstream: np.ndarray, activation: Activation) -> np.ndarray:
    """Chain rule through the activation; ReLU has derivative 0 at 0"""
    if activation == Activation.RELU:
        return upstream * (z > 0)
    return upstream


@dataclass(eq=False)
class GMGTNLayer:
    """
    General multi-graph tensor network layer

    ``weights[m]`` is W^(m) of shape (J_m, J_{m-1}); ``propagations[m]`` is
    P^(m) of shape (J_m, J_m). Filters are rebuilt from (A, P) on access, so
    they always reflect the current P.
    """
    adjacencies: List[Adjacency]
    weights: List[np.ndarray]
    propagations: List[np.ndarray]
    activation: Activation = Activation.RELU

    def __post_init__(self) -> None:
        if not self.adjacencies or not (len(self.adjacencies) == len(self.weights) == len(self.propagations)):
            raise ShapeMismatchError(
                f"gMGTN needs one weight and one propagation matrix per graph, got "
                f"{len(self.adjacencies)} graphs, {len(self.weights)} weights, {len(self.propagations)} propagations"
            )
        self.weights = [np.asarray(w, dtype=np.float64) for w in self.weights]
        self.propagations = [np.asarray(p, dtype=np.float64) for p in self.propagations]
        for m in range(1, len(self.weights)):
            if self.weights[m].shape[1] != self.weights[m - 1].shape[0]:
                raise ShapeMismatchError(
                    f"W^({m + 1}) takes {self.weights[m].shape[1]} features but W^({m}) produces {self.weights[m - 1].shape[0]}"
                )
        for m, (w, p) in enumerate(zip(self.weights, self.propagations)):
            if p.shape != (w.shape[0], w.shape[0]):
                raise ShapeMismatchError(f"P^({m + 1}) must be {w.shape[0]}x{w.shape[0]}, got {p.shape}")

    @property
    def num_graphs(self) -> int:
        return len(self.adjacencies)

    @property
    def feature_dims(self) -> Tuple[int, ...]:
        """(J_0, J_1, ..., J_M)"""
        return (self.weights[0].shape[1],) + tuple(w.shape[0] for w in self.weights)

    @property
    def graph_sizes(self) -> Tuple[int, ...]:
        return tuple(a.n for a in self.adjacencies)

    @property
    def filters(self) -> List[GraphFilter]:
        return [multilinear_filter(a, p) for a, p in zip(self.adjacencies, self.propagations)]


@dataclass(eq=False)
class FMGTNLayer:
    """
    Fast multi-graph tensor network layer

    One weight W^(x) of shape (J_1, J_0) shared across graph domains, and a
    fixed shift filter (I + A^(m)) per graph mode.
    """
    adjacencies: List[Adjacency]
    weight: np.ndarray
    activation: Activation = Activation.RELU
    shifts: List[np.ndarray] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.weight = np.asarray(self.weight, dtype=np.float64)
        if self.weight.ndim != 2:
            raise ShapeMismatchError(f"W^(x) must be a matrix, got shape {self.weight.shape}")
        self.shifts = [shift_filter(a).shift.array for a in self.adjacencies]

    @property
    def filters(self) -> List[GraphFilter]:
        return [shift_filter(a) for a in self.adjacencies]

    @property
    def graph_sizes(self) -> Tuple[int, ...]:
        return tuple(a.n for a in self.adjacencies)


def _check_input(x_shape: Tuple[int, ...], features: int, graph_sizes: Sequence[int], offset: int = 0) -> None:
    expected = (features,) + tuple(graph_sizes)
    if tuple(x_shape[offset:]) != expected:
        raise ShapeMismatchError(f"layer expects input of shape {expected}, got {tuple(x_shape[offset:])}")


def gmgtn_forward(layer: GMGTNLayer, x: DenseTensor) -> DenseTensor:
    """
    gMGTN forward pass on one sample

    Args:
        layer: Layer parameters
        x: Input of shape (J_0, I_1, ..., I_M)

    Returns:
        Output of shape (J_M, I_1, ..., I_M)
    """
    _check_input(x.shape, layer.feature_dims[0], layer.graph_sizes)
    y = x
    for m, graph_filter in enumerate(layer.filters):
        y = contract(DenseTensor(layer.weights[m]), 2, y, 1)
        # filter modes (3, 4) against the feature mode and graph mode m
        y = contract(graph_filter.multilinear, (3, 4), y, (1, m + 2))
        y = DenseTensor(np.moveaxis(y.array, 1, m + 1))
    return DenseTensor(activate(y.array, layer.activation))


def fmgtn_forward(layer: FMGTNLayer, x: DenseTensor) -> DenseTensor:
    """
    fMGTN forward pass on one sample

    The shift filters are applied as mode products that keep the mode order
    (J_1, I_1, ..., I_M); the result equals the rotating contraction chain
    up to that permutation of modes.
    """
    _check_input(x.shape, layer.weight.shape[1], layer.graph_sizes)
    y = mode_product(x, DenseTensor(layer.weight), 1)
    for m, graph_filter in enumerate(layer.filters):
        y = graph_filter.apply(y, m + 2)
    return DenseTensor(activate(y.array, layer.activation))


# Batched kernels: axis 0 is the batch, axis 1 the feature mode, axis m + 2
# the m-th graph mode.

def fmgtn_forward_batch(x: np.ndarray, weight: np.ndarray, shifts: Sequence[np.ndarray]) -> np.ndarray:
    """Pre-activation fMGTN output for a batch"""
    _check_input(x.shape, weight.shape[1], [s.shape[0] for s in shifts], offset=1)
    y = mode_dot(x, weight, 1)
    for m, shift in enumerate(shifts):
        y = mode_dot(y, shift, m + 2)
    return y


def fmgtn_backward_batch(
    x: np.ndarray, weight: np.ndarray, shifts: Sequence[np.ndarray], grad_pre: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Backward pass of ``fmgtn_forward_batch``

    Returns:
        (gradient w.r.t. the weight, gradient w.r.t. the input)
    """
    grad = grad_pre
    for m in reversed(range(len(shifts))):
        grad = mode_dot(grad, shifts[m].T, m + 2)
    others = [0] + list(range(2, x.ndim))
    grad_weight = np.tensordot(grad, x, axes=(others, others))
    return grad_weight, mode_dot(grad, weight.T, 1)


def gmgtn_forward_batch(
    x: np.ndarray,
    weights: Sequence[np.ndarray],
    propagations: Sequence[np.ndarray],
    adjacencies: Sequence[np.ndarray],
) -> Tuple[np.ndarray, List[Tuple[np.ndarray, np.ndarray]]]:
    """
    Pre-activation gMGTN output for a batch

    Returns:
        (output, per-stage cache of (stage input, graph-propagated signal))
    """
    _check_input(x.shape, weights[0].shape[1], [a.shape[0] for a in adjacencies], offset=1)
    stages = []
    z = x
    for m, (w, p, a) in enumerate(zip(weights, propagations, adjacencies)):
        u = mode_dot(z, w, 1)
        g = mode_dot(u, a, m + 2)
        stages.append((z, g))
        z = u + mode_dot(g, p, 1)
    return z, stages


def gmgtn_backward_batch(
    weights: Sequence[np.ndarray],
    propagations: Sequence[np.ndarray],
    adjacencies: Sequence[np.ndarray],
    stages: Sequence[Tuple[np.ndarray, np.ndarray]],
    grad_pre: np.ndarray,
) -> Tuple[List[np.ndarray], List[np.ndarray], np.ndarray]:
    """
    Backward pass of ``gmgtn_forward_batch``

    Returns:
        (weight gradients, propagation gradients, input gradient)
    """
    grad_weights: List[np.ndarray] = [None] * len(weights)
    grad_props: List[np.ndarray] = [None] * len(weights)
    grad = grad_pre
    for m in reversed(range(len(weights))):
        z_in, g = stages[m]
        others = [0] + list(range(2, grad.ndim))
        grad_props[m] = np.tensordot(grad, g, axes=(others, others))
        grad_g = mode_dot(grad, propagations[m].T, 1)
        grad_u = grad + mode_dot(grad_g, adjacencies[m].T, m + 2)
        grad_weights[m] = np.tensordot(grad_u, z_in, axes=(others, others))
        grad = mode_dot(grad_u, weights[m].T, 1)
    return grad_weights, grad_props, grad
