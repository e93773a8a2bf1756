"""
Adam optimizer over named parameter arrays
"""
from collections import OrderedDict
from typing import Dict

import numpy as np

from app.core.exceptions import ShapeMismatchError
from app.mgtn.network import GradientSet


class AdamState:
    """Step count and per-array moment accumulators"""

    def __init__(
        self,
        params: Dict[str, np.ndarray],
        learning_rate: float = 2e-4,
        beta1: float = 0.9,
        beta2: float = 0.999,
        epsilon: float = 1e-8,
    ):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.step = 0
        self.first_moment: "OrderedDict[str, np.ndarray]" = OrderedDict(
            (name, np.zeros_like(array)) for name, array in params.items()
        )
        self.second_moment: "OrderedDict[str, np.ndarray]" = OrderedDict(
            (name, np.zeros_like(array)) for name, array in params.items()
        )


def adam_step(adam: AdamState, params: Dict[str, np.ndarray], grads: GradientSet) -> None:
    """
    One bias-corrected Adam update, in place

    Raises:
        ShapeMismatchError: if parameters, gradients and moments disagree
    """
    if set(grads.names()) != set(params) or set(params) != set(adam.first_moment):
        raise ShapeMismatchError(
            f"parameter names {sorted(params)} do not match gradients {sorted(grads.names())}"
        )
    for name, array in params.items():
        if grads[name].shape != array.shape or adam.first_moment[name].shape != array.shape:
            raise ShapeMismatchError(
                f"{name}: parameter {array.shape}, gradient {grads[name].shape}, "
                f"moment {adam.first_moment[name].shape}"
            )

    adam.step += 1
    correction1 = 1.0 - adam.beta1 ** adam.step
    correction2 = 1.0 - adam.beta2 ** adam.step
    for name, array in params.items():
        grad = grads[name]
        m = adam.first_moment[name]
        v = adam.second_moment[name]
        m *= adam.beta1
        m += (1.0 - adam.beta1) * grad
        v *= adam.beta2
        v += (1.0 - adam.beta2) * grad * grad
        array -= adam.learning_rate * (m / correction1) / (np.sqrt(v / correction2) + adam.epsilon)
