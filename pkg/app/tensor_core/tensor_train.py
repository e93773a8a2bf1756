"""
Tensor-train tensors and matrices

A TT tensor stores an order-N tensor as cores G^(n) of shape
(R_{n-1}, I_n, R_n); a TT matrix stores a (prod J_out x prod J_in) matrix as
cores of shape (R_{k-1}, J_out_k, J_in_k, R_k). Boundary ranks are 1.
"""
from __future__ import annotations

import math
import string
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from app.core.exceptions import InvalidArgumentError, ShapeMismatchError
from app.tensor_core.dense import DenseTensor, contract, le_reshape

RankSpec = Union[int, Sequence[int]]


def _check_rank_chain(ranks: List[Tuple[int, int]], kind: str) -> None:
    if ranks[0][0] != 1 or ranks[-1][1] != 1:
        raise ShapeMismatchError(f"{kind} boundary ranks must be 1, got {ranks[0][0]} and {ranks[-1][1]}")
    for k in range(len(ranks) - 1):
        if ranks[k][1] != ranks[k + 1][0]:
            raise ShapeMismatchError(
                f"{kind} core {k + 1} trailing rank {ranks[k][1]} differs from "
                f"core {k + 2} leading rank {ranks[k + 1][0]}"
            )


@dataclass(frozen=True)
class TTTensor:
    """Tensor in tensor-train format"""
    cores: Tuple[DenseTensor, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "cores", tuple(self.cores))
        if not self.cores:
            raise InvalidArgumentError("a TT tensor needs at least one core")
        for k, core in enumerate(self.cores):
            if core.order != 3:
                raise ShapeMismatchError(f"TT core {k + 1} must be order 3, got shape {core.shape}")
        _check_rank_chain([(c.shape[0], c.shape[2]) for c in self.cores], "TT")

    @property
    def ranks(self) -> Tuple[int, ...]:
        return (1,) + tuple(core.shape[2] for core in self.cores)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(core.shape[1] for core in self.cores)

    def param_count(self) -> int:
        return sum(core.size for core in self.cores)


@dataclass(frozen=True)
class TTMatrix:
    """Matrix in tensor-train format (TT-matrix / MPO)"""
    cores: Tuple[DenseTensor, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "cores", tuple(self.cores))
        if not self.cores:
            raise InvalidArgumentError("a TT matrix needs at least one core")
        for k, core in enumerate(self.cores):
            if core.order != 4:
                raise ShapeMismatchError(f"TT-matrix core {k + 1} must be order 4, got shape {core.shape}")
        _check_rank_chain([(c.shape[0], c.shape[3]) for c in self.cores], "TT-matrix")

    @property
    def in_modes(self) -> Tuple[int, ...]:
        return tuple(core.shape[2] for core in self.cores)

    @property
    def out_modes(self) -> Tuple[int, ...]:
        return tuple(core.shape[1] for core in self.cores)

    @property
    def ranks(self) -> Tuple[int, ...]:
        return (1,) + tuple(core.shape[3] for core in self.cores)

    @property
    def shape(self) -> Tuple[int, int]:
        """(rows, columns) of the represented matrix"""
        return math.prod(self.out_modes), math.prod(self.in_modes)

    @property
    def core_arrays(self) -> List[np.ndarray]:
        return [core.array for core in self.cores]

    def param_count(self) -> int:
        return sum(core.size for core in self.cores)

    def transpose(self) -> "TTMatrix":
        """TT representation of the transposed matrix"""
        return TTMatrix(tuple(DenseTensor(np.swapaxes(core.array, 1, 2)) for core in self.cores))

    def to_dense(self) -> DenseTensor:
        """
        Materialize the represented matrix

        Rows and columns are Little-Endian multi-indices over the output and
        input factorizations.
        """
        full = DenseTensor(self.cores[0].array[0])
        for core in self.cores[1:]:
            full = contract(full, full.order, core, 1)
        # (o_1, i_1, ..., o_d, i_d) after dropping the unit trailing rank
        arranged = full.array.reshape(full.shape[:-1])
        d = len(self.cores)
        permutation = list(range(0, 2 * d, 2)) + list(range(1, 2 * d, 2))
        return DenseTensor(le_reshape(np.transpose(arranged, permutation), self.shape))

    @classmethod
    def identity(cls, modes: Sequence[int]) -> "TTMatrix":
        """Rank-1 TT matrix of the identity, each core slice-diagonal"""
        return cls(tuple(DenseTensor(np.eye(size)[None, :, :, None]) for size in modes))

    @classmethod
    def zeros(
        cls, out_modes: Sequence[int], in_modes: Sequence[int], ranks: Sequence[int]
    ) -> "TTMatrix":
        _check_factorization(out_modes, in_modes, ranks)
        return cls(tuple(
            DenseTensor.zeros((ranks[k], out_modes[k], in_modes[k], ranks[k + 1]))
            for k in range(len(out_modes))
        ))

    @classmethod
    def from_dense(
        cls,
        matrix: DenseTensor,
        out_modes: Sequence[int],
        in_modes: Sequence[int],
        max_ranks: Optional[RankSpec] = None,
        tolerance: Optional[float] = None,
    ) -> "TTMatrix":
        """
        Compress a dense matrix with TT-SVD over the paired (out_k, in_k) modes
        """
        _check_factorization(out_modes, in_modes, [1] * (len(out_modes) + 1))
        if matrix.shape != (math.prod(out_modes), math.prod(in_modes)):
            raise ShapeMismatchError(
                f"matrix of shape {matrix.shape} does not match factorization {tuple(out_modes)} x {tuple(in_modes)}"
            )
        d = len(out_modes)
        split = le_reshape(matrix.array, list(out_modes) + list(in_modes))
        paired = [axis for k in range(d) for axis in (k, d + k)]
        merged = np.transpose(split, paired).reshape([out_modes[k] * in_modes[k] for k in range(d)])
        train = tt_svd(DenseTensor(merged), max_ranks=max_ranks, tolerance=tolerance)
        return cls(tuple(
            DenseTensor(core.array.reshape(core.shape[0], out_modes[k], in_modes[k], core.shape[2]))
            for k, core in enumerate(train.cores)
        ))


def _check_factorization(out_modes: Sequence[int], in_modes: Sequence[int], ranks: Sequence[int]) -> None:
    if len(out_modes) != len(in_modes) or len(ranks) != len(out_modes) + 1:
        raise ShapeMismatchError(
            f"factorization lengths disagree: out {len(out_modes)}, in {len(in_modes)}, ranks {len(ranks)}"
        )
    if any(size < 1 for size in list(out_modes) + list(in_modes)):
        raise InvalidArgumentError("mode sizes must be positive")
    if ranks[0] != 1 or ranks[-1] != 1 or any(r < 1 for r in ranks):
        raise InvalidArgumentError(f"ranks must be positive with unit boundaries, got {list(ranks)}")


def _rank_caps(max_ranks: Optional[RankSpec], order: int) -> List[int]:
    """Normalize a rank specification to the N-1 interior rank caps"""
    interior = order - 1
    if max_ranks is None:
        return [np.iinfo(np.int64).max] * interior
    if isinstance(max_ranks, (int, np.integer)):
        caps = [int(max_ranks)] * interior
    else:
        caps = [int(r) for r in max_ranks]
        if len(caps) == order + 1:
            if caps[0] != 1 or caps[-1] != 1:
                raise InvalidArgumentError(f"boundary ranks must be 1, got {caps}")
            caps = caps[1:-1]
        if len(caps) != interior:
            raise InvalidArgumentError(f"expected {interior} interior ranks for order {order}, got {len(caps)}")
    if any(cap < 1 for cap in caps):
        raise InvalidArgumentError(f"ranks must be positive, got {caps}")
    return caps


def _truncation_rank(singular_values: np.ndarray, budget: float, cap: int) -> int:
    """Smallest rank whose discarded singular values stay within ``budget``"""
    tail = np.sqrt(np.cumsum((singular_values ** 2)[::-1]))[::-1]
    # tail[r] is the Frobenius norm of the values dropped when keeping r
    keep = len(singular_values)
    for r in range(1, len(singular_values)):
        if tail[r] <= budget:
            keep = r
            break
    return max(1, min(keep, cap))


def tt_svd(
    x: DenseTensor,
    max_ranks: Optional[RankSpec] = None,
    tolerance: Optional[float] = None,
) -> TTTensor:
    """
    TT-SVD: left-to-right sequence of truncated SVDs of the unfoldings

    Args:
        x: Tensor to decompose, order >= 1
        max_ranks: Cap on interior ranks; an int, the N-1 interior ranks, or
            the full (1, R_1, ..., R_{N-1}, 1) list
        tolerance: Relative Frobenius error bound in (0, 1); each unfolding
            may discard tolerance / sqrt(N-1) of the norm of ``x``

    Returns:
        TT tensor whose reconstruction is within ``tolerance`` of ``x``
        (exact to round-off when neither bound is given)
    """
    if x.order < 1:
        raise InvalidArgumentError("tt_svd needs a tensor of order >= 1")
    if tolerance is not None and not 0.0 < tolerance < 1.0:
        raise InvalidArgumentError(f"tolerance must lie in (0, 1), got {tolerance}")
    order = x.order
    caps = _rank_caps(max_ranks, order)
    budget = 0.0
    if tolerance is not None and order > 1:
        budget = tolerance / math.sqrt(order - 1) * x.norm()

    cores = []
    rank = 1
    remainder = x.array
    for k in range(order - 1):
        unfolding = remainder.reshape(rank * x.shape[k], -1)
        u, s, vt = np.linalg.svd(unfolding, full_matrices=False)
        # singular values at round-off level are dropped even without a tolerance
        floor = s[0] * max(unfolding.shape) * np.finfo(np.float64).eps
        next_rank = _truncation_rank(s, max(budget, floor), caps[k])
        cores.append(DenseTensor(u[:, :next_rank].reshape(rank, x.shape[k], next_rank)))
        remainder = s[:next_rank, None] * vt[:next_rank]
        rank = next_rank
    cores.append(DenseTensor(remainder.reshape(rank, x.shape[-1], 1)))
    return TTTensor(tuple(cores))


def tt_reconstruct(t: TTTensor) -> DenseTensor:
    """Contract the core chain G^(1) - G^(2) - ... back into a dense tensor"""
    result = t.cores[0]
    for core in t.cores[1:]:
        result = contract(result, result.order, core, 1)
    return DenseTensor(result.array.reshape(t.shape))


def tt_matvec_batch(cores: Sequence[np.ndarray], inputs: np.ndarray) -> np.ndarray:
    """
    Apply a TT matrix to a batch without forming the dense matrix

    Args:
        cores: Core arrays (R_{k-1}, J_out_k, J_in_k, R_k)
        inputs: Array of shape (B, J_in_1, ..., J_in_d)

    Returns:
        Array of shape (B, J_out_1, ..., J_out_d)
    """
    in_modes = tuple(core.shape[2] for core in cores)
    out_modes = tuple(core.shape[1] for core in cores)
    if inputs.shape[1:] != in_modes:
        raise ShapeMismatchError(f"input modes {inputs.shape[1:]} do not match TT input modes {in_modes}")
    batch = inputs.shape[0]
    lead = batch
    state = inputs.reshape(batch, 1, -1)
    for core in cores:
        rank, n_out, n_in, next_rank = core.shape
        state = state.reshape(lead, rank * n_in, -1)
        folded = np.transpose(core, (0, 2, 1, 3)).reshape(rank * n_in, n_out * next_rank)
        state = np.einsum("ajz,jm->amz", state, folded)
        lead *= n_out
        state = state.reshape(lead, next_rank, -1)
    return state.reshape((batch,) + out_modes)


def tt_core_gradients(
    cores: Sequence[np.ndarray], inputs: np.ndarray, grad_outputs: np.ndarray
) -> List[np.ndarray]:
    """
    Gradients of <grad_outputs, W x> with respect to every TT core

    Each core's gradient contracts the upstream gradient and the inputs
    against all other cores (the left and right partial chains), summed over
    the batch.

    Args:
        cores: Core arrays (R_{k-1}, J_out_k, J_in_k, R_k)
        inputs: (B, J_in_1, ..., J_in_d)
        grad_outputs: (B, J_out_1, ..., J_out_d)

    Returns:
        One array per core, shaped like the core
    """
    d = len(cores)
    if d > 7:
        raise InvalidArgumentError("TT matrices with more than 7 cores are not supported")
    outs, ins, ranks = string.ascii_lowercase[:d], string.ascii_lowercase[7:7 + d], string.ascii_uppercase[:d + 1]
    terms = [ranks[k] + outs[k] + ins[k] + ranks[k + 1] for k in range(d)]
    gradients = []
    for k in range(d):
        # unit vectors carry the boundary ranks so that every output letter has an operand
        operands = [grad_outputs, inputs, np.ones(cores[0].shape[0]), np.ones(cores[-1].shape[3])]
        operands += [cores[j] for j in range(d) if j != k]
        subscripts = ["z" + outs, "z" + ins, ranks[0], ranks[d]] + [terms[j] for j in range(d) if j != k]
        expression = ",".join(subscripts) + "->" + terms[k]
        gradients.append(np.einsum(expression, *operands, optimize="greedy"))
    return gradients


def tt_matvec(w: TTMatrix, x: DenseTensor) -> DenseTensor:
    """
    Matrix-vector product with a TT matrix

    Args:
        w: TT matrix
        x: Tensor shaped like ``w.in_modes``, or a flat Little-Endian vector
            of matching length

    Returns:
        Tensor shaped like ``w.out_modes``
    """
    if x.shape == w.in_modes:
        values = x.array
    elif x.order == 1 and x.size == w.shape[1]:
        values = le_reshape(x.array, w.in_modes)
    else:
        raise ShapeMismatchError(f"input of shape {x.shape} does not fit TT input modes {w.in_modes}")
    return DenseTensor(tt_matvec_batch(w.core_arrays, values[None])[0])
