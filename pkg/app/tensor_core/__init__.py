"""
Dense tensor algebra and tensor-train machinery
"""
from app.tensor_core.dense import (
    DenseTensor,
    contract,
    kron,
    le_flatten,
    le_reshape,
    linear_index,
    matricize,
    mode_dot,
    mode_product,
    multi_index,
    tensorize,
)
from app.tensor_core.tensor_train import (
    TTMatrix,
    TTTensor,
    tt_core_gradients,
    tt_matvec,
    tt_matvec_batch,
    tt_reconstruct,
    tt_svd,
)

__all__ = [
    "DenseTensor",
    "TTMatrix",
    "TTTensor",
    "contract",
    "kron",
    "le_flatten",
    "le_reshape",
    "linear_index",
    "matricize",
    "mode_dot",
    "mode_product",
    "multi_index",
    "tensorize",
    "tt_core_gradients",
    "tt_matvec",
    "tt_matvec_batch",
    "tt_reconstruct",
    "tt_svd",
]
