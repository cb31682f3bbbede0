"""Trainable layers built on the Tensor core.

Initialization conventions: dense weights are orthogonal (scaled QR of a
Gaussian), convolution weights are uniform with fan-in scaling, biases start
at zero unless a layer overrides them.
"""

from __future__ import annotations

import numpy as np

from . import tensor as T
from .tensor import Tensor


class Module:
    """Container whose parameters are discovered by attribute walk."""

    def named_parameters(self, prefix: str = "") -> list[tuple[str, Tensor]]:
        found: list[tuple[str, Tensor]] = []
        for name, value in vars(self).items():
            key = f"{prefix}{name}"
            if isinstance(value, Tensor) and value.requires_grad:
                found.append((key, value))
            elif isinstance(value, Module):
                found.extend(value.named_parameters(f"{key}."))
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        found.extend(item.named_parameters(f"{key}.{i}."))
                    elif isinstance(item, Tensor) and item.requires_grad:
                        found.append((f"{key}.{i}", item))
        return found

    def parameters(self) -> list[Tensor]:
        return [p for _, p in self.named_parameters()]

    def zero_grad(self):
        for p in self.parameters():
            p.grad = None

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)


def orthogonal(shape: tuple[int, int], rng: np.random.Generator, gain: float = 1.0,
               dtype=np.float32) -> np.ndarray:
    """Orthogonal matrix via QR of a Gaussian draw, sign-fixed for uniqueness."""
    rows, cols = shape
    flat = rng.standard_normal((max(rows, cols), min(rows, cols)))
    q, r = np.linalg.qr(flat)
    q *= np.sign(np.diag(r))
    if rows < cols:
        q = q.T
    return (gain * q[:rows, :cols]).astype(dtype)


class Dense(Module):
    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator, *,
                 gain: float = np.sqrt(2.0), dtype=np.float32):
        self.weight = Tensor(orthogonal((in_dim, out_dim), rng, gain, dtype),
                             requires_grad=True)
        self.bias = Tensor(np.zeros(out_dim, dtype=dtype), requires_grad=True)

    def forward(self, x: Tensor) -> Tensor:
        return x @ self.weight + self.bias


class Conv2d(Module):
    def __init__(self, in_channels: int, out_channels: int, kernel: int, stride: int,
                 rng: np.random.Generator, *, dtype=np.float32):
        fan_in = in_channels * kernel * kernel
        bound = 1.0 / np.sqrt(fan_in)
        shape = (out_channels, in_channels, kernel, kernel)
        self.weight = Tensor(rng.uniform(-bound, bound, shape).astype(dtype),
                             requires_grad=True)
        self.bias = Tensor(np.zeros((out_channels, 1, 1), dtype=dtype),
                           requires_grad=True)
        self.stride = stride

    def forward(self, x: Tensor) -> Tensor:
        return T.conv2d(x, self.weight, self.stride) + self.bias


class LayerNorm(Module):
    """Normalize over the last axis, then apply a learned affine map."""

    def __init__(self, dim: int, *, eps: float = 1e-5, dtype=np.float32):
        self.scale = Tensor(np.ones(dim, dtype=dtype), requires_grad=True)
        self.shift = Tensor(np.zeros(dim, dtype=dtype), requires_grad=True)
        self.eps = eps

    def forward(self, x: Tensor) -> Tensor:
        centered = x - x.mean(axis=-1, keepdims=True)
        variance = (centered * centered).mean(axis=-1, keepdims=True)
        normalized = centered / T.sqrt(variance + self.eps)
        return normalized * self.scale + self.shift


def conv_output_hw(hw: tuple[int, int], kernel: int, stride: int) -> tuple[int, int]:
    h, w = hw
    return (h - kernel) // stride + 1, (w - kernel) // stride + 1
