"""
Three-layer Q-network: graph feature extractor, TT-dense hidden layer and a
linear output layer, with hand-derived reverse-mode gradients
"""
from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.core.exceptions import ForwardCacheError, InvalidArgumentError, ShapeMismatchError
from app.core.logging import logger
from app.graph import Adjacency
from app.mgtn.layers import (
    fmgtn_backward_batch,
    fmgtn_forward_batch,
    gmgtn_backward_batch,
    gmgtn_forward_batch,
)
from app.models.config import ACTIONS, ArchitectureConfig, ExtractorKind
from app.tensor_core import DenseTensor, TTMatrix, tt_core_gradients, tt_matvec_batch

InputShape = Tuple[int, int, int]


def _flatten_le_batch(array: np.ndarray) -> np.ndarray:
    """(B, n_1, ..., n_d) -> (B, n_1 * ... * n_d), Little-Endian per sample"""
    axes = (0,) + tuple(range(array.ndim - 1, 0, -1))
    return np.transpose(array, axes).reshape(array.shape[0], -1)


def _unflatten_le_batch(matrix: np.ndarray, modes: Sequence[int]) -> np.ndarray:
    """Inverse of ``_flatten_le_batch``"""
    d = len(modes)
    reversed_shape = (matrix.shape[0],) + tuple(reversed(modes))
    axes = (0,) + tuple(range(d, 0, -1))
    return np.transpose(matrix.reshape(reversed_shape), axes)


def parameter_shapes(arch: ArchitectureConfig, input_shape: InputShape) -> "OrderedDict[str, Tuple[int, ...]]":
    """
    Names and shapes of every trainable array, in optimizer order

    Args:
        arch: Architecture settings
        input_shape: (J_0, I_1, I_2) of one state

    Returns:
        Ordered mapping name -> shape
    """
    features, lags, nodes = input_shape
    hidden = arch.hidden_features
    shapes: "OrderedDict[str, Tuple[int, ...]]" = OrderedDict()
    if arch.extractor == ExtractorKind.GMGTN:
        shapes["extractor.weight_1"] = (hidden, features)
        shapes["extractor.propagation_1"] = (hidden, hidden)
        shapes["extractor.weight_2"] = (hidden, hidden)
        shapes["extractor.propagation_2"] = (hidden, hidden)
    else:
        shapes["extractor.weight"] = (hidden, features)
    in_modes = (hidden, lags, nodes)
    ranks = arch.tt_ranks
    for k, (n_out, n_in) in enumerate(zip(arch.tt_output_modes, in_modes)):
        shapes[f"hidden.core_{k + 1}"] = (ranks[k], n_out, n_in, ranks[k + 1])
    shapes["hidden.bias"] = (arch.hidden_units,)
    shapes["output.weight"] = (ACTIONS, arch.hidden_units)
    shapes["output.bias"] = (ACTIONS,)
    return shapes


def param_breakdown(arch: ArchitectureConfig, input_shape: InputShape) -> Dict[str, Any]:
    """
    Closed-form parameter counts per component

    extractor: J_1 J_0 for fMGTN/TTNN, J_1 J_0 + 3 J_1^2 for gMGTN (two
    propagation matrices and the second feature transform);
    hidden: sum_k R_{k-1} O_k N_k R_k + prod O_k with N = (J_1, I_1, I_2);
    output: 2 prod O_k + 2.

    Returns:
        Counts per component, their total, the dense equivalent of the TT
        layer and its compression ratio
    """
    features, lags, nodes = input_shape
    hidden = arch.hidden_features
    extractor = hidden * features
    if arch.extractor == ExtractorKind.GMGTN:
        extractor += 3 * hidden * hidden
    in_modes = (hidden, lags, nodes)
    ranks = arch.tt_ranks
    cores = sum(
        ranks[k] * arch.tt_output_modes[k] * in_modes[k] * ranks[k + 1]
        for k in range(len(in_modes))
    )
    units = arch.hidden_units
    dense_equivalent = units * math.prod(in_modes)
    output = ACTIONS * units + ACTIONS
    return {
        "extractor": extractor,
        "hidden_cores": cores,
        "hidden_bias": units,
        "output": output,
        "total": extractor + cores + units + output,
        "dense_equivalent": dense_equivalent,
        "compression_ratio": dense_equivalent / cores,
    }


@dataclass
class ForwardCache:
    """Activations of one batched forward pass, tied to a parameter version"""
    version: int
    inputs: np.ndarray
    extractor_pre: np.ndarray
    extracted: np.ndarray
    hidden_pre: np.ndarray
    hidden: np.ndarray
    q_values: np.ndarray
    extractor_stages: List[Tuple[np.ndarray, np.ndarray]] = field(default_factory=list)


class GradientSet:
    """One gradient array per trainable parameter array"""

    def __init__(self, arrays: "OrderedDict[str, np.ndarray]"):
        for name, grad in arrays.items():
            if not np.all(np.isfinite(grad)):
                raise InvalidArgumentError(f"gradient of {name} has non-finite entries")
        self._arrays = arrays

    def __getitem__(self, name: str) -> np.ndarray:
        return self._arrays[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._arrays)

    def __len__(self) -> int:
        return len(self._arrays)

    def items(self):
        return self._arrays.items()

    def names(self) -> List[str]:
        return list(self._arrays)

    def is_zero(self) -> bool:
        return all(not np.any(grad) for grad in self._arrays.values())


class AgentNetwork:
    """
    Q-network of the trading agent

    Parameters live in ``params``, an ordered name -> array mapping updated
    in place by the optimizer. Adjacencies are fixed inputs: the time graph
    on the lag mode and the carry graph on the currency mode. With the
    ``ttnn`` extractor both are replaced by empty graphs so the filters
    become identities.
    """

    def __init__(
        self,
        architecture: ArchitectureConfig,
        input_shape: InputShape,
        adjacencies: Sequence[Adjacency],
    ):
        input_shape = tuple(int(size) for size in input_shape)
        if len(input_shape) != 3:
            raise ShapeMismatchError(f"agent input must be (J_0, I_1, I_2), got {input_shape}")
        if len(adjacencies) != 2:
            raise InvalidArgumentError(f"agent needs a lag graph and a currency graph, got {len(adjacencies)}")
        for adjacency, size, name in zip(adjacencies, input_shape[1:], ("lag", "currency")):
            if adjacency.n != size:
                raise ShapeMismatchError(f"{name} graph has {adjacency.n} nodes, input mode has {size}")

        self.architecture = architecture
        self.input_shape: InputShape = input_shape
        if architecture.extractor == ExtractorKind.TTNN:
            adjacencies = [Adjacency.empty(a.n, a.labels) for a in adjacencies]
        self.adjacencies: List[Adjacency] = list(adjacencies)
        self._adjacency_arrays = [np.array(a.weights) for a in self.adjacencies]
        self._shifts = [np.eye(a.n) + a.weights for a in self.adjacencies]
        self.params: "OrderedDict[str, np.ndarray]" = OrderedDict(
            (name, np.zeros(shape)) for name, shape in parameter_shapes(architecture, input_shape).items()
        )
        self.version = 0

    @property
    def tt_input_modes(self) -> Tuple[int, int, int]:
        return (self.architecture.hidden_features,) + self.input_shape[1:]

    @property
    def tt_output_modes(self) -> Tuple[int, ...]:
        return tuple(self.architecture.tt_output_modes)

    @property
    def core_names(self) -> List[str]:
        return [f"hidden.core_{k + 1}" for k in range(len(self.tt_output_modes))]

    def num_parameters(self) -> int:
        """Runtime enumeration of trainable scalars"""
        return sum(array.size for array in self.params.values())

    def tt_matrix(self) -> TTMatrix:
        return TTMatrix(tuple(DenseTensor(self.params[name]) for name in self.core_names))

    def mark_updated(self) -> None:
        """Invalidate forward caches after an in-place parameter update"""
        self.version += 1

    def copy(self) -> "AgentNetwork":
        """Structurally identical network with its own parameter storage"""
        clone = AgentNetwork(self.architecture, self.input_shape, self.adjacencies)
        clone.load_state_from(self)
        return clone

    def load_state_from(self, other: "AgentNetwork") -> None:
        """Hard copy of every parameter array of ``other`` into this network"""
        self.load_state_dict(other.params)

    def state_dict(self) -> "OrderedDict[str, np.ndarray]":
        return OrderedDict((name, array.copy()) for name, array in self.params.items())

    def load_state_dict(self, state: Dict[str, np.ndarray]) -> None:
        missing = [name for name in self.params if name not in state]
        extra = [name for name in state if name not in self.params]
        if missing or extra:
            raise ShapeMismatchError(f"parameter sets differ: missing {missing}, unexpected {extra}")
        for name, target in self.params.items():
            source = np.asarray(state[name], dtype=np.float64)
            if source.shape != target.shape:
                raise ShapeMismatchError(
                    f"parameter {name} has shape {source.shape}, network expects {target.shape}"
                )
            np.copyto(target, source)
        self.mark_updated()

    def forward(self, states: np.ndarray) -> ForwardCache:
        """
        Batched forward pass

        Args:
            states: Array of shape (B, J_0, I_1, I_2)

        Returns:
            Cache holding every activation; ``q_values`` has shape (B, 2)
        """
        states = np.asarray(states, dtype=np.float64)
        if states.shape[1:] != self.input_shape:
            raise ShapeMismatchError(f"states of shape {states.shape[1:]}, network expects {self.input_shape}")
        params = self.params
        stages: List[Tuple[np.ndarray, np.ndarray]] = []
        if self.architecture.extractor == ExtractorKind.GMGTN:
            extractor_pre, stages = gmgtn_forward_batch(
                states,
                [params["extractor.weight_1"], params["extractor.weight_2"]],
                [params["extractor.propagation_1"], params["extractor.propagation_2"]],
                self._adjacency_arrays,
            )
        else:
            extractor_pre = fmgtn_forward_batch(states, params["extractor.weight"], self._shifts)
        extracted = np.maximum(extractor_pre, 0.0)

        cores = [params[name] for name in self.core_names]
        hidden_pre = _flatten_le_batch(tt_matvec_batch(cores, extracted)) + params["hidden.bias"]
        hidden = np.maximum(hidden_pre, 0.0)
        q_values = hidden @ params["output.weight"].T + params["output.bias"]
        return ForwardCache(
            version=self.version,
            inputs=states,
            extractor_pre=extractor_pre,
            extracted=extracted,
            hidden_pre=hidden_pre,
            hidden=hidden,
            q_values=q_values,
            extractor_stages=stages,
        )

    def q_values(self, states: np.ndarray) -> np.ndarray:
        """Action values for a batch of states, shape (B, 2)"""
        return self.forward(states).q_values

    def backward(self, cache: Optional[ForwardCache], grad_q: np.ndarray) -> GradientSet:
        """
        Reverse-mode gradients of sum(grad_q * Q) with respect to every parameter

        Args:
            cache: Result of ``forward`` on the current parameters
            grad_q: Upstream gradient, shape (B, 2) or (2,) for a single sample

        Returns:
            Gradients keyed like ``params``
        """
        if cache is None:
            raise ForwardCacheError("backward called without a forward cache")
        if cache.version != self.version:
            raise ForwardCacheError(
                f"forward cache is from parameter version {cache.version}, network is at {self.version}"
            )
        grad_q = np.asarray(grad_q, dtype=np.float64)
        if grad_q.ndim == 1:
            grad_q = grad_q[None, :]
        if grad_q.shape != cache.q_values.shape:
            raise ShapeMismatchError(f"upstream gradient of shape {grad_q.shape}, Q-values are {cache.q_values.shape}")

        params = self.params
        grads: "OrderedDict[str, np.ndarray]" = OrderedDict()
        grad_out_weight = grad_q.T @ cache.hidden
        grad_out_bias = grad_q.sum(axis=0)

        grad_hidden_pre = (grad_q @ params["output.weight"]) * (cache.hidden_pre > 0)
        grad_hidden_bias = grad_hidden_pre.sum(axis=0)
        grad_tt_out = _unflatten_le_batch(grad_hidden_pre, self.tt_output_modes)
        cores = [params[name] for name in self.core_names]
        core_grads = tt_core_gradients(cores, cache.extracted, grad_tt_out)
        transposed = [np.swapaxes(core, 1, 2) for core in cores]
        grad_extracted = tt_matvec_batch(transposed, grad_tt_out)
        grad_extractor_pre = grad_extracted * (cache.extractor_pre > 0)

        if self.architecture.extractor == ExtractorKind.GMGTN:
            weight_grads, prop_grads, _ = gmgtn_backward_batch(
                [params["extractor.weight_1"], params["extractor.weight_2"]],
                [params["extractor.propagation_1"], params["extractor.propagation_2"]],
                self._adjacency_arrays,
                cache.extractor_stages,
                grad_extractor_pre,
            )
            grads["extractor.weight_1"] = weight_grads[0]
            grads["extractor.propagation_1"] = prop_grads[0]
            grads["extractor.weight_2"] = weight_grads[1]
            grads["extractor.propagation_2"] = prop_grads[1]
        else:
            grads["extractor.weight"], _ = fmgtn_backward_batch(
                cache.inputs, params["extractor.weight"], self._shifts, grad_extractor_pre
            )
        for name, grad in zip(self.core_names, core_grads):
            grads[name] = grad
        grads["hidden.bias"] = grad_hidden_bias
        grads["output.weight"] = grad_out_weight
        grads["output.bias"] = grad_out_bias
        return GradientSet(OrderedDict((name, grads[name]) for name in params))


def agent_forward(net: AgentNetwork, x: DenseTensor) -> np.ndarray:
    """
    Q-values of a single state

    Args:
        net: Agent network
        x: State tensor (J_0, I_1, I_2)

    Returns:
        Vector (Q(x, Buy), Q(x, Sell))
    """
    if x.shape != net.input_shape:
        raise ShapeMismatchError(f"state of shape {x.shape}, network expects {net.input_shape}")
    return net.q_values(x.array[None])[0]


def agent_backward(net: AgentNetwork, cache: Optional[ForwardCache], grad_q: np.ndarray) -> GradientSet:
    return net.backward(cache, grad_q)


def param_count(net: AgentNetwork) -> int:
    """
    Trainable scalars of ``net`` from the closed form of ``param_breakdown``

    The closed form is checked against the enumeration of parameter arrays.
    """
    total = param_breakdown(net.architecture, net.input_shape)["total"]
    enumerated = net.num_parameters()
    if total != enumerated:
        raise ShapeMismatchError(f"closed-form parameter count {total} differs from enumeration {enumerated}")
    return total


def init_params(net: AgentNetwork, seed: Union[int, np.random.SeedSequence]) -> None:
    """
    Deterministic initialization

    Matrices are Glorot-uniform. TT cores are uniform with per-core variance
    v = (sigma^2 / prod R_k)^(1/d), so that entries of the reconstructed
    matrix have the Glorot variance sigma^2 = 2 / (fan_in + fan_out).
    Propagation matrices start at the identity and biases at zero.
    """
    rng = np.random.default_rng(seed)
    arch = net.architecture
    for name, array in net.params.items():
        if name.startswith("hidden.core_") or name.endswith("bias"):
            continue
        if ".propagation_" in name:
            array[...] = np.eye(array.shape[0])
            continue
        fan_out, fan_in = array.shape
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        array[...] = rng.uniform(-limit, limit, size=array.shape)

    fan_in, fan_out = math.prod(net.tt_input_modes), arch.hidden_units
    target_variance = 2.0 / (fan_in + fan_out)
    d = len(net.core_names)
    rank_product = math.prod(arch.tt_ranks[1:-1])
    core_variance = (target_variance / rank_product) ** (1.0 / d)
    limit = math.sqrt(3.0 * core_variance)
    for name in net.core_names:
        net.params[name][...] = rng.uniform(-limit, limit, size=net.params[name].shape)

    for name, array in net.params.items():
        if name.endswith("bias"):
            array[...] = 0.0
    net.mark_updated()
    logger.debug(f"Initialized {net.num_parameters()} parameters with seed {seed}")
