"""
Dense tensors and the multi-linear algebra on them

Modes are numbered from 1 in every public function, matching the usual
mode-n notation. Flat data is Little-Endian (first index varies fastest);
all conversions between multi-indices, flat data and matrices go through
the helpers at the top of this module.
"""
from __future__ import annotations

import math
from typing import List, Sequence, Tuple, Union

import numpy as np

from app.core.exceptions import InvalidArgumentError, ShapeMismatchError

Modes = Union[int, Sequence[int]]


# Little-Endian index arithmetic

def linear_index(index: Sequence[int], shape: Sequence[int]) -> int:
    """
    Little-Endian linear position of a 0-based multi-index

    Args:
        index: Multi-index (i_1, ..., i_N), 0-based
        shape: Mode sizes (I_1, ..., I_N)

    Returns:
        i_1 + I_1 * (i_2 + I_2 * (i_3 + ...))
    """
    if len(index) != len(shape):
        raise ShapeMismatchError(f"index of length {len(index)} for an order-{len(shape)} shape")
    position, stride = 0, 1
    for i, size in zip(index, shape):
        if not 0 <= i < size:
            raise InvalidArgumentError(f"index {i} out of range for mode of size {size}")
        position += i * stride
        stride *= size
    return position


def multi_index(position: int, shape: Sequence[int]) -> Tuple[int, ...]:
    """
    Inverse of ``linear_index``

    Args:
        position: Little-Endian linear position
        shape: Mode sizes

    Returns:
        0-based multi-index
    """
    total = math.prod(shape)
    if not 0 <= position < total:
        raise InvalidArgumentError(f"position {position} out of range for {total} entries")
    index = []
    for size in shape:
        index.append(position % size)
        position //= size
    return tuple(index)


def le_flatten(array: np.ndarray) -> np.ndarray:
    """Flatten an array with the first index varying fastest"""
    return np.reshape(array, -1, order="F")


def le_reshape(data: np.ndarray, shape: Sequence[int]) -> np.ndarray:
    """Reshape flat (or matricized) data read in Little-Endian order"""
    return np.reshape(data, tuple(shape), order="F")


def mode_dot(array: np.ndarray, matrix: np.ndarray, axis: int) -> np.ndarray:
    """
    Mode product on raw arrays: multiply ``matrix`` (K x I) into ``axis``

    The result keeps the axis order of ``array``, with the size of ``axis``
    replaced by K. ``axis`` is 0-based; leading batch axes are allowed.
    """
    if matrix.shape[1] != array.shape[axis]:
        raise ShapeMismatchError(
            f"matrix with {matrix.shape[1]} columns applied to axis of size {array.shape[axis]}"
        )
    return np.moveaxis(np.tensordot(matrix, array, axes=(1, axis)), 0, axis)


class DenseTensor:
    """
    N-mode real array with an explicit shape

    Values are stored as a read-only float64 numpy array; ``data`` exposes
    them flattened in Little-Endian order. An order-0 tensor is a scalar.
    """
    __slots__ = ("_array",)

    def __init__(self, values) -> None:
        array = np.array(values, dtype=np.float64)
        if any(size <= 0 for size in array.shape):
            raise InvalidArgumentError(f"mode sizes must be positive, got {array.shape}")
        if not np.all(np.isfinite(array)):
            raise InvalidArgumentError("tensor entries must be finite")
        array.setflags(write=False)
        self._array = array

    @classmethod
    def from_flat(cls, shape: Sequence[int], data: Sequence[float]) -> "DenseTensor":
        """Build from mode sizes and Little-Endian flat data"""
        data = np.asarray(data, dtype=np.float64).reshape(-1)
        if data.size != math.prod(shape):
            raise ShapeMismatchError(
                f"{data.size} values do not fill a tensor of shape {tuple(shape)}"
            )
        return cls(le_reshape(data, shape))

    @classmethod
    def zeros(cls, shape: Sequence[int]) -> "DenseTensor":
        return cls(np.zeros(tuple(shape)))

    @property
    def array(self) -> np.ndarray:
        return self._array

    @property
    def shape(self) -> Tuple[int, ...]:
        return self._array.shape

    @property
    def order(self) -> int:
        return self._array.ndim

    @property
    def size(self) -> int:
        return self._array.size

    @property
    def data(self) -> np.ndarray:
        return le_flatten(self._array)

    def norm(self) -> float:
        """Frobenius norm"""
        return float(np.linalg.norm(self._array.reshape(-1)))

    def __add__(self, other: "DenseTensor") -> "DenseTensor":
        if self.shape != other.shape:
            raise ShapeMismatchError(f"cannot add shapes {self.shape} and {other.shape}")
        return DenseTensor(self._array + other.array)

    def __sub__(self, other: "DenseTensor") -> "DenseTensor":
        if self.shape != other.shape:
            raise ShapeMismatchError(f"cannot subtract shapes {self.shape} and {other.shape}")
        return DenseTensor(self._array - other.array)

    def __mul__(self, scalar: float) -> "DenseTensor":
        return DenseTensor(self._array * float(scalar))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"DenseTensor(shape={self.shape})"

    def to_text(self) -> str:
        """
        Debug dump: a ``shape:`` header line followed by one value per line

        Values are written with ``repr`` so that ``from_text`` is exact.
        """
        header = "shape: " + " ".join(str(size) for size in self.shape)
        return "\n".join([header] + [repr(float(v)) for v in self.data]) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "DenseTensor":
        lines = [line.strip() for line in text.strip().splitlines()]
        if not lines or not lines[0].startswith("shape:"):
            raise InvalidArgumentError("tensor dump must start with a 'shape:' header")
        shape = [int(token) for token in lines[0][len("shape:"):].split()]
        return cls.from_flat(shape, [float(v) for v in lines[1:]])


def _mode_axes(modes: Modes, order: int, name: str) -> List[int]:
    """Validate 1-based modes and return 0-based axes"""
    if isinstance(modes, (int, np.integer)):
        modes = [int(modes)]
    axes = []
    for mode in modes:
        if not 1 <= mode <= order:
            raise InvalidArgumentError(f"{name}: mode {mode} out of range for an order-{order} tensor")
        axes.append(int(mode) - 1)
    if len(set(axes)) != len(axes):
        raise InvalidArgumentError(f"{name}: duplicate mode in {list(modes)}")
    return axes


def contract(a: DenseTensor, modes_a: Modes, b: DenseTensor, modes_b: Modes) -> DenseTensor:
    """
    Contract paired modes of two tensors

    The k-th mode of ``modes_a`` is summed against the k-th mode of
    ``modes_b``. With a single pair this is the (modes_a, modes_b)
    contraction of order N+M-2.

    Args:
        a: Left operand
        modes_a: Modes of ``a`` to contract (1-based)
        b: Right operand
        modes_b: Modes of ``b`` to contract (1-based)

    Returns:
        Tensor whose modes are the surviving modes of ``a`` followed by
        the surviving modes of ``b``, each in original order
    """
    axes_a = _mode_axes(modes_a, a.order, "modes_a")
    axes_b = _mode_axes(modes_b, b.order, "modes_b")
    if len(axes_a) != len(axes_b):
        raise ShapeMismatchError(
            f"contracting {len(axes_a)} modes of a against {len(axes_b)} modes of b"
        )
    for axis_a, axis_b in zip(axes_a, axes_b):
        if a.shape[axis_a] != b.shape[axis_b]:
            raise ShapeMismatchError(
                f"mode {axis_a + 1} of a has size {a.shape[axis_a]} but "
                f"mode {axis_b + 1} of b has size {b.shape[axis_b]}"
            )

    free_a = [k for k in range(a.order) if k not in axes_a]
    free_b = [k for k in range(b.order) if k not in axes_b]
    shared = math.prod(a.shape[k] for k in axes_a)

    left = np.transpose(a.array, free_a + axes_a).reshape(-1, shared)
    right = np.transpose(b.array, axes_b + free_b).reshape(shared, -1)
    out_shape = [a.shape[k] for k in free_a] + [b.shape[k] for k in free_b]
    return DenseTensor((left @ right).reshape(out_shape))


def kron(a: DenseTensor, b: DenseTensor) -> DenseTensor:
    """
    Left Kronecker product of two tensors of equal order

    Entry (i_n, j_n) of each mode pair lands at composite index
    i_n * J_n + j_n (0-based), so mode n has size I_n * J_n.
    """
    if a.order != b.order:
        raise ShapeMismatchError(f"kron of an order-{a.order} and an order-{b.order} tensor")
    order = a.order
    outer = np.multiply.outer(a.array, b.array)
    interleaved = [axis for n in range(order) for axis in (n, order + n)]
    shape = [a.shape[n] * b.shape[n] for n in range(order)]
    return DenseTensor(np.transpose(outer, interleaved).reshape(shape))


def mode_product(x: DenseTensor, matrix: DenseTensor, n: int) -> DenseTensor:
    """
    Mode-n product x ×_n M for M of shape (K, I_n), keeping mode order
    """
    if matrix.order != 2:
        raise ShapeMismatchError("mode product needs an order-2 matrix")
    axis = _mode_axes(n, x.order, "n")[0]
    return DenseTensor(mode_dot(x.array, matrix.array, axis))


def matricize(x: DenseTensor, n: Modes) -> DenseTensor:
    """
    Mode-n matricization

    Args:
        x: Tensor to unfold
        n: Row mode (1-based), or a sequence of row modes

    Returns:
        Matrix of shape (prod of row modes, prod of remaining modes); rows and
        columns are Little-Endian multi-indices, columns over the remaining
        modes in ascending order
    """
    rows = _mode_axes(n, x.order, "n")
    cols = [k for k in range(x.order) if k not in rows]
    n_rows = math.prod(x.shape[k] for k in rows)
    n_cols = math.prod(x.shape[k] for k in cols)
    return DenseTensor(le_reshape(np.transpose(x.array, rows + cols), (n_rows, n_cols)))


def tensorize(m: DenseTensor, target_shape: Sequence[int], n: Modes) -> DenseTensor:
    """
    Exact inverse of ``matricize`` for the same shape and row modes

    With row modes (1, 2) a (J*I x J*I) matrix folds into a (J, I, J, I)
    tensor, the layout used by multi-linear graph filters.
    """
    if m.order != 2:
        raise ShapeMismatchError(f"tensorize expects a matrix, got order {m.order}")
    target_shape = tuple(int(size) for size in target_shape)
    rows = _mode_axes(n, len(target_shape), "n")
    cols = [k for k in range(len(target_shape)) if k not in rows]
    expected = (
        math.prod(target_shape[k] for k in rows),
        math.prod(target_shape[k] for k in cols),
    )
    if m.shape != expected:
        raise ShapeMismatchError(
            f"matrix of shape {m.shape} cannot fold into {target_shape} along {n}; expected {expected}"
        )
    permutation = rows + cols
    folded = le_reshape(m.array, [target_shape[k] for k in permutation])
    return DenseTensor(np.transpose(folded, np.argsort(permutation)))
