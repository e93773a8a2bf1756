"""
Shared test helpers
"""
import numpy as np

from app.graph import Adjacency


def random_adjacency(rng, n, density=0.6):
    """Symmetric non-negative adjacency with zero diagonal"""
    weights = rng.uniform(0.1, 1.0, size=(n, n)) * (rng.random((n, n)) < density)
    weights = np.triu(weights, 1)
    return Adjacency(weights + weights.T)


def finite_difference_check(net, states, grad_q, rng, coordinates=10, h=1e-5):
    """
    Largest relative error between backward gradients and central
    differences of sum(grad_q * Q) over random coordinates of every array
    """
    grads = net.backward(net.forward(states), grad_q)
    worst = 0.0
    for name, array in net.params.items():
        for _ in range(coordinates):
            index = tuple(int(rng.integers(size)) for size in array.shape)
            original = array[index]
            array[index] = original + h
            net.mark_updated()
            plus = float(np.sum(grad_q * net.q_values(states)))
            array[index] = original - h
            net.mark_updated()
            minus = float(np.sum(grad_q * net.q_values(states)))
            array[index] = original
            net.mark_updated()
            numeric = (plus - minus) / (2 * h)
            analytic = grads[name][index]
            scale = max(abs(numeric), abs(analytic), 1e-6)
            worst = max(worst, abs(numeric - analytic) / scale)
    return worst
