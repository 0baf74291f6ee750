"""Minimal reverse-mode automatic differentiation on numpy arrays.

A Tensor wraps a float64 ndarray and records its parents plus a local
backward rule; backward() walks the tape in reverse topological order and
accumulates exact gradients.  Only the operations the training losses need
are provided; everything is deterministic given its inputs.
"""

from __future__ import annotations

import numpy as np


def _unbroadcast(grad, shape):
    """Sum out broadcast axes so grad matches the parent's shape."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


class Tensor:
    __slots__ = ("data", "grad", "_parents", "_backward")

    def __init__(self, data, parents=(), backward=None):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = None
        self._parents = parents
        self._backward = backward

    @property
    def shape(self):
        return self.data.shape

    def _accum(self, g):
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += g

    def backward(self):
        if self.data.ndim != 0 and self.data.size != 1:
            raise ValueError("backward() requires a scalar loss")
        order = []
        seen = set()

        def visit(t):
            if id(t) in seen:
                return
            seen.add(id(t))
            for p in t._parents:
                visit(p)
            order.append(t)

        visit(self)
        self.grad = np.ones_like(self.data)
        for t in reversed(order):
            if t._backward is not None and t.grad is not None:
                t._backward(t.grad)

    # ---- arithmetic ----

    def __add__(self, other):
        other = as_tensor(other)
        out = Tensor(self.data + other.data, (self, other))

        def bw(g):
            self._accum(_unbroadcast(g, self.data.shape))
            other._accum(_unbroadcast(g, other.data.shape))
        out._backward = bw
        return out

    __radd__ = __add__

    def __neg__(self):
        out = Tensor(-self.data, (self,))
        out._backward = lambda g: self._accum(-g)
        return out

    def __sub__(self, other):
        return self + (-as_tensor(other))

    def __rsub__(self, other):
        return as_tensor(other) + (-self)

    def __mul__(self, other):
        other = as_tensor(other)
        out = Tensor(self.data * other.data, (self, other))

        def bw(g):
            self._accum(_unbroadcast(g * other.data, self.data.shape))
            other._accum(_unbroadcast(g * self.data, other.data.shape))
        out._backward = bw
        return out

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_tensor(other)
        out = Tensor(self.data / other.data, (self, other))

        def bw(g):
            self._accum(_unbroadcast(g / other.data, self.data.shape))
            other._accum(_unbroadcast(-g * self.data / (other.data * other.data),
                                      other.data.shape))
        out._backward = bw
        return out

    def __matmul__(self, other):
        other = as_tensor(other)
        out = Tensor(self.data @ other.data, (self, other))

        def bw(g):
            a, b = self.data, other.data
            if a.ndim == 1:
                self._accum(g @ b.T)
                other._accum(np.outer(a, g))
            else:
                self._accum(g @ b.T)
                other._accum(a.T @ g)
        out._backward = bw
        return out

    def sum(self, axis=None):
        out = Tensor(self.data.sum(axis=axis), (self,))

        def bw(g):
            if axis is None:
                self._accum(np.broadcast_to(g, self.data.shape).copy())
            else:
                self._accum(np.broadcast_to(np.expand_dims(g, axis),
                                            self.data.shape).copy())
        out._backward = bw
        return out

    def mean(self, axis=None):
        n = self.data.size if axis is None else self.data.shape[axis]
        return self.sum(axis=axis) * (1.0 / n)

    def square(self):
        return self * self


def as_tensor(x):
    return x if isinstance(x, Tensor) else Tensor(x)


def exp(t):
    t = as_tensor(t)
    out = Tensor(np.exp(t.data), (t,))
    out._backward = lambda g: t._accum(g * out.data)
    return out


def log(t):
    t = as_tensor(t)
    out = Tensor(np.log(t.data), (t,))
    out._backward = lambda g: t._accum(g / t.data)
    return out


def tanh(t):
    t = as_tensor(t)
    out = Tensor(np.tanh(t.data), (t,))
    out._backward = lambda g: t._accum(g * (1.0 - out.data * out.data))
    return out


def sigmoid(t):
    t = as_tensor(t)
    s = 1.0 / (1.0 + np.exp(-t.data))
    out = Tensor(s, (t,))
    out._backward = lambda g: t._accum(g * s * (1.0 - s))
    return out


def relu(t):
    t = as_tensor(t)
    out = Tensor(np.maximum(t.data, 0.0), (t,))
    out._backward = lambda g: t._accum(g * (t.data > 0.0))
    return out


def swish(t):
    """x * sigmoid(x)."""
    t = as_tensor(t)
    s = 1.0 / (1.0 + np.exp(-t.data))
    out = Tensor(t.data * s, (t,))
    out._backward = lambda g: t._accum(g * (s + t.data * s * (1.0 - s)))
    return out


def log_softmax(t, axis=-1):
    t = as_tensor(t)
    z = t.data - t.data.max(axis=axis, keepdims=True)
    lse = np.log(np.exp(z).sum(axis=axis, keepdims=True))
    y = z - lse
    out = Tensor(y, (t,))

    def bw(g):
        p = np.exp(y)
        t._accum(g - p * g.sum(axis=axis, keepdims=True))
    out._backward = bw
    return out


def softmax(t, axis=-1):
    return exp(log_softmax(t, axis=axis))


def clip(t, lo, hi):
    """Clamp to constant bounds; gradient passes only inside [lo, hi]."""
    t = as_tensor(t)
    mask = (t.data >= lo) & (t.data <= hi)
    out = Tensor(np.clip(t.data, lo, hi), (t,))
    out._backward = lambda g: t._accum(g * mask)
    return out


def minimum(a, b):
    """Elementwise min; gradient follows the smaller argument (ties -> a)."""
    a, b = as_tensor(a), as_tensor(b)
    take_a = a.data <= b.data
    out = Tensor(np.where(take_a, a.data, b.data), (a, b))

    def bw(g):
        a._accum(_unbroadcast(g * take_a, a.data.shape))
        b._accum(_unbroadcast(g * ~take_a, b.data.shape))
    out._backward = bw
    return out
