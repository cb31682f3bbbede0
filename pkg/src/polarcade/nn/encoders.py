"""Pixel encoders and the shared MLP head.

Two encoder families with deliberately different output geometry:

* :class:`EncoderDQN` — three convolutions then a flatten; features are
  unbounded ReLU activations.
* :class:`EncoderSAC` — four convolutions, a dense projection to a small
  feature vector, layer normalization, and tanh; features live in (-1, 1).

Both take channels-first float input scaled to [0, 1]; :func:`to_input`
converts the stacked uint8 observations the environments emit.
"""

from __future__ import annotations

import numpy as np

from . import tensor as T
from .layers import Conv2d, Dense, LayerNorm, Module, conv_output_hw
from .tensor import Tensor


def to_input(obs: np.ndarray, dtype=np.float32) -> Tensor:
    """(H, W, C) or (B, H, W, C) uint8 -> (B, C, H, W) float in [0, 1]."""
    if obs.ndim == 3:
        obs = obs[None]
    scaled = obs.astype(dtype) / dtype(255.0)
    return Tensor(np.ascontiguousarray(scaled.transpose(0, 3, 1, 2)))


class EncoderDQN(Module):
    """16@5x5/s2 -> 32@3x3/s2 -> 32@3x3/s1, ReLU throughout, flattened."""

    def __init__(self, in_channels: int, hw: tuple[int, int],
                 rng: np.random.Generator, *, dtype=np.float32):
        self.conv1 = Conv2d(in_channels, 16, 5, 2, rng, dtype=dtype)
        self.conv2 = Conv2d(16, 32, 3, 2, rng, dtype=dtype)
        self.conv3 = Conv2d(32, 32, 3, 1, rng, dtype=dtype)
        hw = conv_output_hw(hw, 5, 2)
        hw = conv_output_hw(hw, 3, 2)
        hw = conv_output_hw(hw, 3, 1)
        self.feature_dim = 32 * hw[0] * hw[1]

    def forward(self, x: Tensor) -> Tensor:
        h = T.relu(self.conv1(x))
        h = T.relu(self.conv2(h))
        h = T.relu(self.conv3(h))
        return h.reshape(h.shape[0], self.feature_dim)


class EncoderSAC(Module):
    """Four 32-filter 3x3 convs (strides 2,1,1,1) -> dense -> LayerNorm -> tanh."""

    def __init__(self, in_channels: int, hw: tuple[int, int],
                 rng: np.random.Generator, *, feature_dim: int = 64,
                 dtype=np.float32):
        strides = (2, 1, 1, 1)
        channels = [in_channels, 32, 32, 32, 32]
        self.convs = [
            Conv2d(channels[i], channels[i + 1], 3, strides[i], rng, dtype=dtype)
            for i in range(4)
        ]
        for stride in strides:
            hw = conv_output_hw(hw, 3, stride)
        self.project = Dense(32 * hw[0] * hw[1], feature_dim, rng, gain=1.0, dtype=dtype)
        self.norm = LayerNorm(feature_dim, dtype=dtype)
        self.feature_dim = feature_dim
        self._flat = 32 * hw[0] * hw[1]

    def forward(self, x: Tensor) -> Tensor:
        h = x
        for conv in self.convs:
            h = T.relu(conv(h))
        h = h.reshape(h.shape[0], self._flat)
        return T.tanh(self.norm(self.project(h)))


class MLPHead(Module):
    """Two 256-unit ReLU layers followed by a linear output."""

    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator, *,
                 hidden: int = 256, zero_final: bool = False, dtype=np.float32):
        self.fc1 = Dense(in_dim, hidden, rng, dtype=dtype)
        self.fc2 = Dense(hidden, hidden, rng, dtype=dtype)
        self.out = Dense(hidden, out_dim, rng, gain=1.0, dtype=dtype)
        if zero_final:
            self.out.weight.data[:] = 0.0
            self.out.bias.data[:] = 0.0

    def forward(self, x: Tensor) -> Tensor:
        h = T.relu(self.fc1(x))
        h = T.relu(self.fc2(h))
        return self.out(h)
