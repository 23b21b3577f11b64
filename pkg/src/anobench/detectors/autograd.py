"""Minimal reverse-mode gradient engine over numpy arrays.

Just enough machinery for a feed-forward autoencoder: matmul, broadcast
bias add, rectifier, and mean-squared-error, each with a hand-written
backward rule.  Gradients accumulate through a topologically sorted tape.
"""

from __future__ import annotations

import numpy as np


class Tensor:
    """A value in the computation graph, with an optional gradient."""

    __slots__ = ("value", "grad", "parents", "_backward")

    def __init__(self, value, parents=(), backward=None):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = None
        self.parents = parents
        self._backward = backward

    @property
    def shape(self):
        return self.value.shape

    def backward(self):
        """Accumulate gradients of this (scalar) tensor into the graph."""
        if self.value.ndim != 0:
            raise ValueError("backward() starts from a scalar loss")
        for node in self._topo_order():
            node.grad = None
        self.grad = np.ones(())
        for node in reversed(self._topo_order()):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    def _topo_order(self):
        order, seen, stack = [], set(), [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent in node.parents:
                stack.append((parent, False))
        return order


def _accumulate(tensor: Tensor, grad: np.ndarray):
    tensor.grad = grad if tensor.grad is None else tensor.grad + grad


def matmul(a: Tensor, b: Tensor) -> Tensor:
    out = Tensor(a.value @ b.value, parents=(a, b))

    def backward(grad):
        _accumulate(a, grad @ b.value.T)
        _accumulate(b, a.value.T @ grad)

    out._backward = backward
    return out


def add_bias(x: Tensor, b: Tensor) -> Tensor:
    """Row-broadcast bias add: (N, D) + (D,)."""
    out = Tensor(x.value + b.value, parents=(x, b))

    def backward(grad):
        _accumulate(x, grad)
        _accumulate(b, grad.sum(axis=0))

    out._backward = backward
    return out


def relu(x: Tensor) -> Tensor:
    out = Tensor(np.maximum(x.value, 0.0), parents=(x,))

    def backward(grad):
        _accumulate(x, grad * (x.value > 0))

    out._backward = backward
    return out


def mse(pred: Tensor, target: np.ndarray) -> Tensor:
    """Mean over all entries of the squared error against a constant target."""
    target = np.asarray(target, dtype=np.float64)
    diff = pred.value - target
    out = Tensor(np.mean(diff**2), parents=(pred,))

    def backward(grad):
        _accumulate(pred, grad * 2.0 * diff / diff.size)

    out._backward = backward
    return out
