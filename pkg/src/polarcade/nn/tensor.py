"""Reverse-mode automatic differentiation over numpy arrays.

Covers exactly the operations the encoders, heads, and losses need:
broadcast arithmetic, matmul, valid-padding strided convolution, pointwise
nonlinearities, reductions, gather, concat, and a numerically stable
log-softmax.  Graphs are built only for inputs that require gradients (or
globally disabled via :func:`no_grad`), so constant/target computations run
at plain numpy speed.
"""

from __future__ import annotations

import contextlib
from typing import Iterable, Sequence

import numpy as np

_grad_enabled = True


@contextlib.contextmanager
def no_grad():
    """Disable graph construction inside the block (target nets, acting)."""
    global _grad_enabled
    previous = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = previous


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum `grad` down to `shape`, undoing numpy broadcasting."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


class Tensor:
    """An ndarray plus an optional gradient and a backward closure."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward", "_consumed")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data)
        self.grad = None
        self.requires_grad = requires_grad
        self._parents: tuple[Tensor, ...] = ()
        self._backward = None
        self._consumed = False

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def _result(data, parents: Sequence["Tensor"], backward) -> "Tensor":
        out = Tensor(data)
        if _grad_enabled and any(p.requires_grad for p in parents):
            out.requires_grad = True
            out._parents = tuple(parents)
            out._backward = backward
        return out

    def _accumulate(self, grad: np.ndarray):
        if self.grad is None:
            self.grad = grad.astype(self.data.dtype, copy=True)
        else:
            self.grad += grad

    # -- basic properties ------------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    def __repr__(self):
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def zero_grad(self):
        self.grad = None

    def item(self) -> float:
        return float(self.data)

    # -- autograd --------------------------------------------------------------

    def backward(self):
        """Backpropagate from a scalar; a second call on the same graph is rejected."""
        if self.data.size != 1:
            raise ValueError("backward() requires a scalar loss")
        if self._consumed:
            raise RuntimeError("backward() already called on this graph; re-run forward")
        if not self.requires_grad:
            raise RuntimeError("loss does not require gradients")

        topo: list[Tensor] = []
        visited: set[int] = set()
        stack = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            if node._consumed:
                raise RuntimeError(
                    "graph node already consumed by a previous backward(); re-run forward"
                )
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if parent.requires_grad and id(parent) not in visited:
                    stack.append((parent, False))

        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node._backward is not None:
                node._backward(node.grad)
                node._consumed = True
                node._backward = None  # free closures eagerly
                node._parents = ()

    # -- arithmetic --------------------------------------------------------------

    def _binary(self, other, forward, backward_pair):
        other = other if isinstance(other, Tensor) else Tensor(np.asarray(other, dtype=self.dtype))
        data = forward(self.data, other.data)

        def backward(grad):
            ga, gb = backward_pair(grad, self.data, other.data, data)
            if self.requires_grad:
                self._accumulate(_unbroadcast(ga, self.data.shape))
            if other.requires_grad:
                other._accumulate(_unbroadcast(gb, other.data.shape))

        return Tensor._result(data, (self, other), backward)

    def __add__(self, other):
        return self._binary(other, np.add, lambda g, a, b, o: (g, g))

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract, lambda g, a, b, o: (g, -g))

    def __rsub__(self, other):
        return Tensor(np.asarray(other, dtype=self.dtype)) - self

    def __mul__(self, other):
        return self._binary(other, np.multiply, lambda g, a, b, o: (g * b, g * a))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(
            other, np.divide, lambda g, a, b, o: (g / b, -g * a / (b * b))
        )

    def __rtruediv__(self, other):
        return Tensor(np.asarray(other, dtype=self.dtype)) / self

    def __neg__(self):
        data = -self.data

        def backward(grad):
            self._accumulate(-grad)

        return Tensor._result(data, (self,), backward)

    def __pow__(self, exponent: float):
        data = self.data**exponent

        def backward(grad):
            self._accumulate(grad * exponent * self.data ** (exponent - 1))

        return Tensor._result(data, (self,), backward)

    def __matmul__(self, other: "Tensor"):
        data = self.data @ other.data

        def backward(grad):
            if self.requires_grad:
                self._accumulate(grad @ other.data.T)
            if other.requires_grad:
                other._accumulate(self.data.T @ grad)

        return Tensor._result(data, (self, other), backward)

    # -- shaping --------------------------------------------------------------

    def reshape(self, *shape):
        original = self.data.shape
        data = self.data.reshape(*shape)

        def backward(grad):
            self._accumulate(grad.reshape(original))

        return Tensor._result(data, (self,), backward)

    def transpose(self, axes: tuple[int, ...]):
        inverse = tuple(int(np.argsort(axes)[i]) for i in range(len(axes)))
        data = self.data.transpose(axes)

        def backward(grad):
            self._accumulate(grad.transpose(inverse))

        return Tensor._result(data, (self,), backward)

    # -- reductions -----------------------------------------------------------

    def sum(self, axis=None, keepdims: bool = False):
        data = self.data.sum(axis=axis, keepdims=keepdims)

        def backward(grad):
            g = grad
            if not keepdims and axis is not None:
                g = np.expand_dims(g, axis)
            self._accumulate(np.broadcast_to(g, self.data.shape).copy())

        return Tensor._result(data, (self,), backward)

    def mean(self, axis=None, keepdims: bool = False):
        count = self.data.size if axis is None else np.prod(
            [self.data.shape[a] for a in np.atleast_1d(axis)]
        )
        return self.sum(axis=axis, keepdims=keepdims) / float(count)


# -- pointwise functions --------------------------------------------------------


def relu(t: Tensor) -> Tensor:
    data = np.maximum(t.data, 0)

    def backward(grad):
        t._accumulate(grad * (t.data > 0))

    return Tensor._result(data, (t,), backward)


def tanh(t: Tensor) -> Tensor:
    data = np.tanh(t.data)

    def backward(grad):
        t._accumulate(grad * (1.0 - data * data))

    return Tensor._result(data, (t,), backward)


def exp(t: Tensor) -> Tensor:
    data = np.exp(t.data)

    def backward(grad):
        t._accumulate(grad * data)

    return Tensor._result(data, (t,), backward)


def log(t: Tensor) -> Tensor:
    data = np.log(t.data)

    def backward(grad):
        t._accumulate(grad / t.data)

    return Tensor._result(data, (t,), backward)


def sqrt(t: Tensor) -> Tensor:
    data = np.sqrt(t.data)

    def backward(grad):
        t._accumulate(grad * 0.5 / data)

    return Tensor._result(data, (t,), backward)


def absolute(t: Tensor) -> Tensor:
    data = np.abs(t.data)

    def backward(grad):
        t._accumulate(grad * np.sign(t.data))

    return Tensor._result(data, (t,), backward)


def minimum(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise min; ties route their gradient to the first argument."""
    mask = a.data <= b.data
    data = np.where(mask, a.data, b.data)

    def backward(grad):
        if a.requires_grad:
            a._accumulate(_unbroadcast(grad * mask, a.data.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(grad * ~mask, b.data.shape))

    return Tensor._result(data, (a, b), backward)


def maximum(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise max; ties route their gradient to the first argument."""
    mask = a.data >= b.data
    data = np.where(mask, a.data, b.data)

    def backward(grad):
        if a.requires_grad:
            a._accumulate(_unbroadcast(grad * mask, a.data.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(grad * ~mask, b.data.shape))

    return Tensor._result(data, (a, b), backward)


def concat(tensors: Iterable[Tensor], axis: int = -1) -> Tensor:
    tensors = list(tensors)
    data = np.concatenate([t.data for t in tensors], axis=axis)
    sizes = [t.data.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def backward(grad):
        for t, lo, hi in zip(tensors, offsets[:-1], offsets[1:]):
            if t.requires_grad:
                idx = [slice(None)] * grad.ndim
                idx[axis] = slice(lo, hi)
                t._accumulate(grad[tuple(idx)])

    return Tensor._result(data, tuple(tensors), backward)


def gather(t: Tensor, indices: np.ndarray, axis: int = -1) -> Tensor:
    """take_along_axis with a scatter backward.

    Indices must not repeat within any slice along `axis` (the selection
    use here picks one entry per row, so the scatter never collides).
    """
    indices = np.asarray(indices)
    data = np.take_along_axis(t.data, indices, axis=axis)

    def backward(grad):
        full = np.zeros_like(t.data)
        np.put_along_axis(full, indices, grad, axis=axis)
        t._accumulate(full)

    return Tensor._result(data, (t,), backward)


def log_softmax(t: Tensor, axis: int = -1) -> Tensor:
    shifted = t.data - t.data.max(axis=axis, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=axis, keepdims=True))
    data = shifted - log_z

    def backward(grad):
        softmax = np.exp(data)
        t._accumulate(grad - softmax * grad.sum(axis=axis, keepdims=True))

    return Tensor._result(data, (t,), backward)


def softmax(t: Tensor, axis: int = -1) -> Tensor:
    return exp(log_softmax(t, axis=axis))


def huber(delta: Tensor, threshold: float = 1.0) -> Tensor:
    """Elementwise Huber penalty of a residual tensor."""
    quadratic = np.abs(delta.data) <= threshold
    data = np.where(
        quadratic,
        0.5 * delta.data**2,
        threshold * (np.abs(delta.data) - 0.5 * threshold),
    )

    def backward(grad):
        slope = np.where(quadratic, delta.data, threshold * np.sign(delta.data))
        delta._accumulate(grad * slope)

    return Tensor._result(data, (delta,), backward)


def conv2d(x: Tensor, w: Tensor, stride: int = 1) -> Tensor:
    """Valid-padding 2D convolution.

    x: (batch, in_channels, height, width); w: (out_channels, in_channels,
    kh, kw).  Implemented as one GEMM per kernel offset, which keeps both
    passes vectorized without im2col buffers.
    """
    batch, cin, h, width = x.data.shape
    cout, cin_w, kh, kw = w.data.shape
    if cin != cin_w:
        raise ValueError(f"channel mismatch: input has {cin}, kernel expects {cin_w}")
    if h < kh or width < kw:
        raise ValueError("kernel larger than input")
    ho = (h - kh) // stride + 1
    wo = (width - kw) // stride + 1

    out = np.zeros((batch, cout, ho, wo), dtype=x.data.dtype)
    for ki in range(kh):
        for kj in range(kw):
            window = x.data[:, :, ki : ki + stride * ho : stride, kj : kj + stride * wo : stride]
            contrib = np.tensordot(window, w.data[:, :, ki, kj], axes=([1], [1]))
            out += contrib.transpose(0, 3, 1, 2)

    def backward(grad):
        if w.requires_grad:
            dw = np.zeros_like(w.data)
            for ki in range(kh):
                for kj in range(kw):
                    window = x.data[
                        :, :, ki : ki + stride * ho : stride, kj : kj + stride * wo : stride
                    ]
                    dw[:, :, ki, kj] = np.tensordot(grad, window, axes=([0, 2, 3], [0, 2, 3]))
            w._accumulate(dw)
        if x.requires_grad:
            dx = np.zeros_like(x.data)
            for ki in range(kh):
                for kj in range(kw):
                    contrib = np.tensordot(grad, w.data[:, :, ki, kj], axes=([1], [0]))
                    dx[:, :, ki : ki + stride * ho : stride, kj : kj + stride * wo : stride] += (
                        contrib.transpose(0, 3, 1, 2)
                    )
            x._accumulate(dx)

    return Tensor._result(out, (x, w), backward)
