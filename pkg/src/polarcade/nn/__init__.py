"""Minimal numpy-backed neural network toolkit: reverse-mode autodiff,
layers, pixel encoders, Adam, and flat checkpoints."""

from .checkpoint import load_arrays, save_arrays
from .encoders import EncoderDQN, EncoderSAC, MLPHead, to_input
from .layers import Conv2d, Dense, LayerNorm, Module, conv_output_hw, orthogonal
from .optim import AdamState, adam_step, hard_update, soft_update, step_with_grads
from .tensor import (
    Tensor,
    absolute,
    concat,
    conv2d,
    exp,
    gather,
    huber,
    log,
    log_softmax,
    maximum,
    minimum,
    no_grad,
    relu,
    softmax,
    sqrt,
    tanh,
)

__all__ = [
    "AdamState",
    "Conv2d",
    "Dense",
    "EncoderDQN",
    "EncoderSAC",
    "LayerNorm",
    "MLPHead",
    "Module",
    "Tensor",
    "absolute",
    "adam_step",
    "concat",
    "conv2d",
    "conv_output_hw",
    "exp",
    "gather",
    "hard_update",
    "huber",
    "load_arrays",
    "log",
    "log_softmax",
    "maximum",
    "minimum",
    "no_grad",
    "orthogonal",
    "relu",
    "save_arrays",
    "softmax",
    "soft_update",
    "sqrt",
    "step_with_grads",
    "tanh",
    "to_input",
]
